#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace multigras::rouge {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static RougeScore from_counts(std::size_t overlap, std::size_t candidate_total,
                                std::size_t reference_total);
};

using NGram = std::vector<std::string>;

class NGramCounts {
 public:
  NGramCounts(const std::vector<std::string>& tokens, std::size_t n);

  std::size_t n() const { return n_; }
  std::size_t total() const { return total_; }
  std::size_t count(const NGram& gram) const;
  const std::map<NGram, std::size_t>& counts() const { return counts_; }

  // Sum over shared n-grams of min(count_a, count_b).
  std::size_t clipped_overlap(const NGramCounts& other) const;

 private:
  std::size_t n_;
  std::size_t total_ = 0;
  std::map<NGram, std::size_t> counts_;
};

RougeScore rouge_n(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, std::size_t n);

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

RougeScore rouge_l(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference);

struct RougeTriple {
  RougeScore r1;
  RougeScore r2;
  RougeScore rl;
};

RougeTriple rouge_all(const std::vector<std::string>& candidate,
                      const std::vector<std::string>& reference);

}  // namespace multigras::rouge
