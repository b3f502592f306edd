#include <map>
#include <numeric>

#include "trackscore/assignment.hpp"
#include "trackscore/baseline_metrics.hpp"

namespace trackscore {

namespace {

double ratio(std::int64_t num, std::int64_t den, bool nothing_scored) {
  if (den > 0) return double(num) / double(den);
  return nothing_scored ? 1.0 : 0.0;
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Max total overlap of a bijective trajectory matching inside one connected
// component, via the augmented square matrix: real pairs cost fn + fp,
// "unmatched" diagonal cells cost the trajectory's length, dummy/dummy cells 0.
std::int64_t component_overlap(const std::vector<std::size_t>& g, const std::vector<std::size_t>& p,
                               const std::map<std::pair<std::size_t, std::size_t>, int>& overlap,
                               const std::vector<int>& g_len, const std::vector<int>& p_len) {
  const std::size_t n = g.size(), m = p.size();
  ScoreMatrix score(n + m, m + n, kIneligible);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      auto it = overlap.find({g[a], p[b]});
      if (it == overlap.end()) continue;
      score(a, b) = -double(g_len[g[a]] - it->second + p_len[p[b]] - it->second);
    }
    score(a, m + a) = -double(g_len[g[a]]);
  }
  for (std::size_t b = 0; b < m; ++b) {
    score(n + b, b) = -double(p_len[p[b]]);
    for (std::size_t a = 0; a < n; ++a) score(n + b, m + a) = 0.0;
  }
  std::int64_t total = 0;
  for (auto [r, c] : solve_max(score).pairs)
    if (r < n && c < m) total += overlap.at({g[r], p[c]});
  return total;
}

}  // namespace

IdentityScores IdentityScores::from_counts(std::int64_t idtp, std::int64_t idfn, std::int64_t idfp) {
  IdentityScores s;
  s.idtp = idtp;
  s.idfn = idfn;
  s.idfp = idfp;
  const bool nothing = idtp + idfn + idfp == 0;
  s.id_recall = ratio(idtp, idtp + idfn, nothing);
  s.id_precision = ratio(idtp, idtp + idfp, nothing);
  const double den = double(idtp) + 0.5 * double(idfn) + 0.5 * double(idfp);
  s.idf1 = den > 0.0 ? double(idtp) / den : (nothing ? 1.0 : 0.0);
  return s;
}

IdentityScores& IdentityScores::operator+=(const IdentityScores& o) {
  return *this = from_counts(idtp + o.idtp, idfn + o.idfn, idfp + o.idfp);
}

IdentityScores idf1(const SequencePair& seq, const SimilarityTensor& sim, double alpha) {
  const IdIndex gt(seq.gt), pr(seq.pr);
  const std::size_t n = gt.size(), m = pr.size();

  std::map<std::pair<std::size_t, std::size_t>, int> overlap;
  for (const auto& frame : sim.frames)
    for (std::size_t i = 0; i < frame.gt_index.size(); ++i)
      for (std::size_t j = 0; j < frame.pr_index.size(); ++j)
        if (frame.values(i, j) >= alpha)
          ++overlap[{gt.index_of(seq.gt[frame.gt_index[i]].id), pr.index_of(seq.pr[frame.pr_index[j]].id)}];

  DisjointSets sets(n + m);
  for (const auto& [key, count] : overlap) sets.unite(key.first, n + key.second);
  std::map<std::size_t, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> components;
  for (const auto& [key, count] : overlap) {
    (void)count;
    components.try_emplace(sets.find(key.first));
  }
  for (std::size_t a = 0; a < n; ++a) {
    auto it = components.find(sets.find(a));
    if (it != components.end()) it->second.first.push_back(a);
  }
  for (std::size_t b = 0; b < m; ++b) {
    auto it = components.find(sets.find(n + b));
    if (it != components.end()) it->second.second.push_back(b);
  }

  std::int64_t idtp = 0;
  for (const auto& [root, members] : components)
    idtp += component_overlap(members.first, members.second, overlap, gt.totals(), pr.totals());

  const auto num_gt = static_cast<std::int64_t>(seq.gt.size());
  const auto num_pr = static_cast<std::int64_t>(seq.pr.size());
  return IdentityScores::from_counts(idtp, num_gt - idtp, num_pr - idtp);
}

}  // namespace trackscore
