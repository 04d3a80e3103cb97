#include "multigras/rouge.hpp"

#include <algorithm>
#include <stdexcept>

namespace multigras::rouge {

RougeScore RougeScore::from_counts(std::size_t overlap, std::size_t candidate_total,
                                   std::size_t reference_total) {
  RougeScore s;
  s.precision = candidate_total == 0 ? 0.0 : static_cast<double>(overlap) / candidate_total;
  s.recall = reference_total == 0 ? 0.0 : static_cast<double>(overlap) / reference_total;
  // 2PR/(P+R) reduces to 2m/(|cand|+|ref|); this form is exactly symmetric.
  s.f1 = overlap == 0 ? 0.0
                      : 2.0 * static_cast<double>(overlap) /
                            static_cast<double>(candidate_total + reference_total);
  return s;
}

NGramCounts::NGramCounts(const std::vector<std::string>& tokens, std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("rouge: n-gram order must be >= 1");
  if (tokens.size() < n) return;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts_[NGram(tokens.begin() + i, tokens.begin() + i + n)];
    ++total_;
  }
}

std::size_t NGramCounts::count(const NGram& gram) const {
  auto it = counts_.find(gram);
  return it == counts_.end() ? 0 : it->second;
}

std::size_t NGramCounts::clipped_overlap(const NGramCounts& other) const {
  std::size_t overlap = 0;
  // Both maps are ordered; walk them in lockstep.
  auto a = counts_.begin();
  auto b = other.counts_.begin();
  while (a != counts_.end() && b != other.counts_.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      overlap += std::min(a->second, b->second);
      ++a;
      ++b;
    }
  }
  return overlap;
}

RougeScore rouge_n(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, std::size_t n) {
  if (n < 1) throw std::invalid_argument("rouge_n: n must be >= 1");
  const NGramCounts cand(candidate, n);
  const NGramCounts ref(reference, n);
  return RougeScore::from_counts(cand.clipped_overlap(ref), cand.total(), ref.total());
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference) {
  return RougeScore::from_counts(lcs_length(candidate, reference), candidate.size(),
                                 reference.size());
}

RougeTriple rouge_all(const std::vector<std::string>& candidate,
                      const std::vector<std::string>& reference) {
  return {rouge_n(candidate, reference, 1), rouge_n(candidate, reference, 2),
          rouge_l(candidate, reference)};
}

}  // namespace multigras::rouge
