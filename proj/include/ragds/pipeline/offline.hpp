#pragma once

#include "ragds/gateway/stub_gateway.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ragds::pipeline {

struct OfflineOptions {
  /// Share of generation calls answered with unusable text.
  double malformed_rate = 0.0;
  std::uint64_t seed = 0;
  std::size_t embedding_dim = 256;
};

/// Canned behavior for every prompt the pipeline sends, keyed on the
/// prompt's shape rather than on scripted hashes:
///   generation  -> JSON array of pairs drawn from the supplied context
///   question    -> one question quoting the source passage
///   condense    -> the follow-up question unchanged
///   judge       -> short rationale and a SCORE line
///   anything else (candidate answers) -> an answer echoing the question
/// Replies depend only on the messages, the call's seed and `model`.
gateway::Responder offline_responder(std::string model, OfflineOptions options = {});

/// Feature-hashed bag of lowercase words, L2-normalized, so that offline
/// retrieval still prefers chunks sharing vocabulary with the query.
std::vector<float> bag_of_words_embedding(std::string_view text, std::size_t dim);

gateway::StubScript offline_script(const std::string& model, const OfflineOptions& options = {});

}  // namespace ragds::pipeline
