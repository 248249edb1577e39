#include <deque>
#include <fstream>
#include <map>

#include <json.hpp>

#include "bamg/chains.hpp"

namespace bamg {

PetriNetSpec molloy_net(unsigned tokens, std::array<double, 5> weights) {
  if (tokens == 0) throw std::invalid_argument("molloy_net: need at least one token");
  PetriNetSpec s;
  s.places = 5;
  s.transitions = {
      {{{0, 1}}, {{1, 1}, {2, 1}}, weights[0]},
      {{{1, 1}}, {{3, 1}}, weights[1]},
      {{{2, 1}}, {{4, 1}}, weights[2]},
      {{{3, 1}, {4, 1}}, {{0, 1}}, weights[3]},
      {{{3, 1}}, {{1, 1}}, weights[4]},
  };
  s.initial_marking = {tokens, 0, 0, 0, 0};
  return s;
}

namespace {

void validate(const PetriNetSpec& s) {
  if (s.places == 0) throw std::invalid_argument("petri net has no places");
  if (s.initial_marking.size() != s.places) {
    throw std::invalid_argument("initial marking length differs from the number of places");
  }
  for (Index t = 0; t < s.transitions.size(); ++t) {
    const auto& tr = s.transitions[t];
    if (tr.inputs.empty() || tr.outputs.empty()) {
      throw std::invalid_argument("transition " + std::to_string(t) + " needs an input and an output arc");
    }
    if (!(tr.weight > 0.0)) {
      throw std::invalid_argument("transition " + std::to_string(t) + " has a nonpositive weight");
    }
    for (const auto* arcs : {&tr.inputs, &tr.outputs}) {
      for (const auto& a : *arcs) {
        if (a.place >= s.places || a.multiplicity == 0) {
          throw std::invalid_argument("transition " + std::to_string(t) + " has an invalid arc");
        }
      }
    }
  }
}

std::vector<PetriArc> arcs_from_json(const nlohmann::json& j) {
  std::vector<PetriArc> out;
  for (const auto& a : j) out.push_back({a.at(0).get<Index>(), a.at(1).get<unsigned>()});
  return out;
}

nlohmann::json arcs_to_json(const std::vector<PetriArc>& arcs) {
  auto j = nlohmann::json::array();
  for (const auto& a : arcs) j.push_back({a.place, a.multiplicity});
  return j;
}

}  // namespace

PetriNetSpec read_petri_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  PetriNetSpec s;
  try {
    s.places = j.at("places").get<Index>();
    for (const auto& t : j.at("transitions")) {
      s.transitions.push_back({arcs_from_json(t.at("inputs")), arcs_from_json(t.at("outputs")),
                               t.value("weight", 1.0)});
    }
    s.initial_marking = j.at("initial_marking").get<std::vector<unsigned>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": malformed petri net: " + e.what());
  }
  validate(s);
  return s;
}

void write_petri_spec(const std::filesystem::path& path, const PetriNetSpec& spec) {
  nlohmann::json j;
  j["places"] = spec.places;
  j["transitions"] = nlohmann::json::array();
  for (const auto& t : spec.transitions) {
    j["transitions"].push_back(
        {{"inputs", arcs_to_json(t.inputs)}, {"outputs", arcs_to_json(t.outputs)}, {"weight", t.weight}});
  }
  j["initial_marking"] = spec.initial_marking;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

ChainProblem petri_reachability(const PetriNetSpec& spec, Index state_cap) {
  validate(spec);
  using Marking = std::vector<unsigned>;
  std::map<Marking, Index> ids;
  std::vector<Marking> states;
  std::deque<Index> queue;
  ids.emplace(spec.initial_marking, 0);
  states.push_back(spec.initial_marking);
  queue.push_back(0);

  std::vector<Triplet> t;
  while (!queue.empty()) {
    const Index from = queue.front();
    queue.pop_front();
    const Marking m = states[from];
    std::vector<std::pair<Index, double>> moves;
    double total = 0.0;
    for (const auto& tr : spec.transitions) {
      bool enabled = true;
      for (const auto& a : tr.inputs) enabled = enabled && m[a.place] >= a.multiplicity;
      if (!enabled) continue;
      Marking next = m;
      for (const auto& a : tr.inputs) next[a.place] -= a.multiplicity;
      for (const auto& a : tr.outputs) next[a.place] += a.multiplicity;
      auto [it, inserted] = ids.emplace(next, states.size());
      if (inserted) {
        if (states.size() >= state_cap) {
          throw NumericalError("petri_reachability: more than " + std::to_string(state_cap) + " reachable markings");
        }
        states.push_back(std::move(next));
        queue.push_back(it->second);
      }
      moves.emplace_back(it->second, tr.weight);
      total += tr.weight;
    }
    if (moves.empty()) {
      throw ChainError("petri_reachability: marking " + std::to_string(from) + " is a deadlock");
    }
    for (const auto& [to, w] : moves) t.push_back({to, from, w / total});
  }
  const Index n = states.size();
  double tokens = 0.0;
  for (unsigned k : spec.initial_marking) tokens += k;
  return make_chain(SparseMatrix::from_triplets(n, n, std::move(t)), ChainFamily::PetriNet,
                    {{"places", static_cast<double>(spec.places)},
                     {"transitions", static_cast<double>(spec.transitions.size())},
                     {"tokens", tokens}},
                    std::nullopt, 0, 1e-14);
}

}  // namespace bamg
