// Copyright 2026 The TablutZero Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tablutzero/tablut_search.hpp"

#include <map>
#include <memory>

namespace tablutzero {

std::vector<Evaluation> evaluate_states(const Params<float>& params,
                                        std::span<const GameState* const> states) {
  const int n = static_cast<int>(states.size());
  std::vector<float> inputs(static_cast<std::size_t>(n) * kPlaneStackSize);
  for (int i = 0; i < n; ++i) {
    encode_state_into(*states[i], std::span(inputs).subspan(static_cast<std::size_t>(i) * kPlaneStackSize,
                                                           kPlaneStackSize));
  }
  const BatchOutput<float> out = forward<float>(params, inputs, n);
  std::vector<Evaluation> evals(n);
  for (int i = 0; i < n; ++i) {
    const auto head = out.head(i, states[i]->to_move());
    evals[i].logits.assign(head.logits.begin(), head.logits.end());
    evals[i].value = head.value;
  }
  return evals;
}

std::vector<SearchResult> run_searches(std::span<const SearchRequest> requests) {
  static const TablutGame game;
  std::vector<std::unique_ptr<GumbelSearch<TablutGame>>> searches;
  searches.reserve(requests.size());
  for (const auto& r : requests)
    searches.push_back(std::make_unique<GumbelSearch<TablutGame>>(game, r.state, r.config));

  for (;;) {
    std::map<const Params<float>*, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < searches.size(); ++i)
      if (searches[i]->pending() != nullptr) groups[requests[i].params].push_back(i);
    if (groups.empty()) break;
    for (const auto& [params, members] : groups) {
      std::vector<const GameState*> states;
      states.reserve(members.size());
      for (std::size_t i : members) states.push_back(searches[i]->pending());
      const auto evals = evaluate_states(*params, states);
      for (std::size_t j = 0; j < members.size(); ++j) searches[members[j]]->supply(evals[j]);
    }
  }

  std::vector<SearchResult> results;
  results.reserve(searches.size());
  for (const auto& s : searches) results.push_back(s->result());
  return results;
}

}  // namespace tablutzero
