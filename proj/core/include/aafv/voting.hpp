#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "aafv/data.hpp"

namespace aafv::voting {

enum class Vote { Negative = 0, Positive = 1, Abstain = 2 };

/// One row of votes per client, all over the same N_u samples.
struct VoteMatrix {
  std::vector<std::vector<Vote>> by_client;  // K x N_u

  std::size_t clients() const { return by_client.size(); }
  std::size_t samples() const {
    return by_client.empty() ? 0 : by_client.front().size();
  }
};

/// Trinary vote from a perturbed confidence score:
///   Negative if p <= tau, Positive if p >= 1 - tau, Abstain otherwise.
/// tau must lie in (0, 0.5) so the three regions are disjoint and non-empty.
std::vector<Vote> local_vote(const std::vector<double>& p_tilde, double tau);

/// Strict majority over non-abstaining votes; ties (including all-abstain)
/// yield Abstain.
std::vector<Vote> consolidate(const VoteMatrix& votes);

/// Keeps exactly the rows with a non-abstain global vote, in original order,
/// labeled by that vote.
LabeledDataset build_pseudo_dataset(const UnlabeledDataset& unlabeled,
                                    const std::vector<Vote>& global_votes);

char vote_symbol(Vote v);

/// One line per sample, one {0,1,*} column per client.
void write_votes_csv(const VoteMatrix& votes, const std::filesystem::path& path);
void write_votes_csv(const std::vector<Vote>& votes,
                     const std::filesystem::path& path);

}  // namespace aafv::voting
