#include "aafv/voting.hpp"

#include <fstream>
#include <stdexcept>

namespace aafv::voting {

std::vector<Vote> local_vote(const std::vector<double>& p_tilde, double tau) {
  if (!(tau > 0.0 && tau < 0.5))
    throw std::invalid_argument("tau must lie in (0, 0.5)");
  std::vector<Vote> out;
  out.reserve(p_tilde.size());
  for (double p : p_tilde) {
    if (p <= tau)
      out.push_back(Vote::Negative);
    else if (p >= 1.0 - tau)
      out.push_back(Vote::Positive);
    else
      out.push_back(Vote::Abstain);
  }
  return out;
}

std::vector<Vote> consolidate(const VoteMatrix& votes) {
  if (votes.by_client.empty())
    throw std::invalid_argument("vote matrix has no clients");
  std::size_t n = votes.by_client.front().size();
  for (const auto& row : votes.by_client)
    if (row.size() != n)
      throw std::invalid_argument("clients voted on differing sample counts");

  std::vector<Vote> out(n, Vote::Abstain);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t pos = 0, neg = 0;
    for (const auto& row : votes.by_client) {
      if (row[i] == Vote::Positive) ++pos;
      else if (row[i] == Vote::Negative) ++neg;
    }
    if (pos > neg) out[i] = Vote::Positive;
    else if (neg > pos) out[i] = Vote::Negative;
  }
  return out;
}

LabeledDataset build_pseudo_dataset(const UnlabeledDataset& unlabeled,
                                    const std::vector<Vote>& global_votes) {
  if (global_votes.size() != unlabeled.size())
    throw std::invalid_argument("vote count does not match unlabeled size");
  std::size_t kept = 0;
  for (Vote v : global_votes)
    if (v != Vote::Abstain) ++kept;

  LabeledDataset out;
  out.features = FeatureMatrix();
  out.features.rows = kept;
  out.features.cols = unlabeled.features.cols;
  out.features.values.reserve(kept * unlabeled.features.cols);
  out.labels.reserve(kept);
  for (std::size_t i = 0; i < global_votes.size(); ++i) {
    if (global_votes[i] == Vote::Abstain) continue;
    auto row = unlabeled.features.row(i);
    out.features.values.insert(out.features.values.end(), row.begin(), row.end());
    out.labels.push_back(global_votes[i] == Vote::Positive ? 1 : 0);
  }
  return out;
}

char vote_symbol(Vote v) {
  switch (v) {
    case Vote::Negative: return '0';
    case Vote::Positive: return '1';
    case Vote::Abstain: return '*';
  }
  throw std::logic_error("unknown vote");
}

void write_votes_csv(const VoteMatrix& votes, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  for (std::size_t i = 0; i < votes.samples(); ++i) {
    for (std::size_t k = 0; k < votes.clients(); ++k) {
      if (k) out << ',';
      out << vote_symbol(votes.by_client[k][i]);
    }
    out << '\n';
  }
}

void write_votes_csv(const std::vector<Vote>& votes,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  for (Vote v : votes) out << vote_symbol(v) << '\n';
}

}  // namespace aafv::voting
