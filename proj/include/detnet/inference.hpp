#pragma once

#include <iosfwd>
#include <vector>

#include "detnet/model.hpp"

namespace detnet {

// DETNET_NUM_WORKERS, clamped to [1, 64]; 1 when unset or unparsable.
int env_num_workers();

// Scores every document (Eval mode). Scoring is reentrant, so documents are
// sharded across workers; output order matches input order.
std::vector<ScoreSet> score_corpus(Model& model,
                                   const std::vector<IndexedDocument>& docs,
                                   int workers = 1);

// One JSON line per document:
//   {"id", "doc_scores", "doc_labels", "sentences":
//     [{"scores", "labels", "word_scores"}, ...]}
void write_predictions_jsonl(Model& model,
                             const std::vector<IndexedDocument>& docs,
                             std::ostream& out, int workers = 1);

}  // namespace detnet
