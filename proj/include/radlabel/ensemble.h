#ifndef RADLABEL_ENSEMBLE_H_
#define RADLABEL_ENSEMBLE_H_

#include <string>
#include <vector>

#include "radlabel/types.h"

namespace radlabel {

enum class TiePolicy { kNegative, kPositive, kRejectEven };

TiePolicy parse_tie_policy(const std::string &name);

// Unweighted per-label majority vote. A report is voted only when every
// member predicted it; otherwise it goes to the ledger as "incomplete-panel".
// kRejectEven throws DataError on the first exact tie.
PredictionSet majority_vote(const std::vector<PredictionSet> &panel,
                            TiePolicy tie = TiePolicy::kNegative);

}  // namespace radlabel

#endif  // RADLABEL_ENSEMBLE_H_
