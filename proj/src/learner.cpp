#include "oa3/learner.hpp"

#include <string>

#include "oa3/errors.hpp"
#include "oa3/learners_exact.hpp"
#include "oa3/learners_sketched.hpp"

namespace oa3 {

std::unique_ptr<Learner> make_learner(Algo algo, std::size_t dim,
                                      const LearnerParams& params) {
  switch (algo) {
    case Algo::OA3:
      return std::make_unique<ExactModel>(dim, false, params.eta, params.gamma,
                                          params.rho);
    case Algo::OA3Diag:
      return std::make_unique<ExactModel>(dim, true, params.eta, params.gamma,
                                          params.rho);
    case Algo::SOA3:
      return std::make_unique<SketchedModel>(dim, params);
    case Algo::SSOA3:
      return std::make_unique<SparseSketchedModel>(dim, params);
  }
  throw ConfigError("unknown algorithm");
}

std::string_view to_string(Algo algo) {
  switch (algo) {
    case Algo::OA3: return "oa3";
    case Algo::OA3Diag: return "oa3_diag";
    case Algo::SOA3: return "soa3";
    case Algo::SSOA3: return "ssoa3";
  }
  return "unknown";
}

Algo parse_algo(std::string_view name) {
  if (name == "oa3") return Algo::OA3;
  if (name == "oa3_diag") return Algo::OA3Diag;
  if (name == "soa3") return Algo::SOA3;
  if (name == "ssoa3") return Algo::SSOA3;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

}  // namespace oa3
