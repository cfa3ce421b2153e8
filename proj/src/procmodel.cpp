#include "overdx/procmodel.hpp"

#include <iomanip>
#include <sstream>

#include "overdx/error.hpp"

namespace overdx {

double ProcessModel::dependency(int a, int b) const {
  auto get = [&](int x, int y) -> double {
    auto it = pair_counts.find({x, y});
    return it == pair_counts.end() ? 0.0 : static_cast<double>(it->second);
  };
  double ab = get(a, b), ba = get(b, a);
  return (ab - ba) / (ab + ba + 1.0);
}

ProcessModel mine(const std::vector<VariantSeq>& variants,
                  const MiningParams& params) {
  if (variants.empty())
    throw ValidationError("mine: empty variant set");
  if (params.dependency_threshold < 0.0 || params.dependency_threshold >= 1.0)
    throw ConfigError("dependency_threshold must be in [0,1)");
  if (params.min_pair_observations < 1)
    throw ConfigError("min_pair_observations must be positive");

  ProcessModel model;
  for (const VariantSeq& v : variants) {
    if (v.activities.empty())
      throw ValidationError("mine: empty variant");
    model.starts.insert(v.activities.front());
    model.ends.insert(v.activities.back());
    for (std::size_t i = 0; i + 1 < v.activities.size(); ++i) {
      model.pair_counts[{v.activities[i], v.activities[i + 1]}] += v.frequency;
    }
  }
  for (const auto& [pair, count] : model.pair_counts) {
    if (count < params.min_pair_observations) continue;
    if (model.dependency(pair.first, pair.second) >=
        params.dependency_threshold) {
      model.edges.insert(pair);
    }
  }
  return model;
}

double replay_fitness(const std::vector<int>& activities,
                      const ProcessModel& model) {
  if (activities.empty())
    throw ValidationError("replay_fitness: empty trace");
  std::int64_t checks = static_cast<std::int64_t>(activities.size()) + 1;
  std::int64_t passed = 0;
  if (model.starts.count(activities.front())) ++passed;
  for (std::size_t i = 0; i + 1 < activities.size(); ++i) {
    if (model.has_edge(activities[i], activities[i + 1])) ++passed;
  }
  if (model.ends.count(activities.back())) ++passed;
  return static_cast<double>(passed) / static_cast<double>(checks);
}

double log_fitness(const std::vector<VariantSeq>& variants,
                   const ProcessModel& model) {
  if (variants.empty())
    throw ValidationError("log_fitness: empty variant set");
  double weighted = 0.0;
  double total = 0.0;
  for (const VariantSeq& v : variants) {
    weighted += static_cast<double>(v.frequency) *
                replay_fitness(v.activities, model);
    total += static_cast<double>(v.frequency);
  }
  return weighted / total;
}

void write_dot(const ProcessModel& model, const ActivityIndex& names,
               std::ostream& out, const std::string& title) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q.push_back('\\');
      q.push_back(c);
    }
    q.push_back('"');
    return q;
  };
  out << "digraph trajectory {\n";
  out << "  rankdir=LR;\n";
  if (!title.empty()) out << "  label=" << quote(title) << ";\n";
  out << "  node [shape=box];\n";
  out << "  __start [shape=circle, label=\"\", style=filled, fillcolor=black, width=0.2];\n";
  out << "  __end [shape=doublecircle, label=\"\", width=0.15];\n";
  std::set<int> nodes(model.starts);
  nodes.insert(model.ends.begin(), model.ends.end());
  for (const auto& e : model.edges) {
    nodes.insert(e.first);
    nodes.insert(e.second);
  }
  for (int n : nodes) out << "  n" << n << " [label=" << quote(names.name(n)) << "];\n";
  for (int s : model.starts) out << "  __start -> n" << s << ";\n";
  for (const auto& e : model.edges) {
    std::ostringstream label;
    label << model.pair_counts.at(e) << " / " << std::fixed
          << std::setprecision(3) << model.dependency(e.first, e.second);
    out << "  n" << e.first << " -> n" << e.second << " [label=" << quote(label.str()) << "];\n";
  }
  for (int e : model.ends) out << "  n" << e << " -> __end;\n";
  out << "}\n";
}

}  // namespace overdx
