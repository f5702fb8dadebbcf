#ifndef MEMBRANE_IO_HPP
#define MEMBRANE_IO_HPP

#include <string>

#include "json.hpp"

#include "membrane/operators.hpp"
#include "membrane/spectrum.hpp"
#include "membrane/stability.hpp"

namespace membrane {

// CSV with header sigma,r,z,phi, one row per grid node, 17 significant
// digits.
void write_profile_csv(const std::string& path, const ProfileCurve& curve);

// CSV with header sigma,r,z,phi,H,K,nu3,q,rme_residual.
void write_fields_csv(const std::string& path, const ProfileCurve& curve,
                      const FieldTable& fields, const ModelParams& params);

// Coordinate-list text "row col value" for the nonzero operator entries.
void write_operator_coo(const std::string& path, const DiscreteOperator& op);

nlohmann::json to_json(const ModelParams& params);
nlohmann::json to_json(const BoundaryData& bd);
nlohmann::json to_json(const EnergyRecord& rec);
nlohmann::json to_json(const IdentityReport& rep);
nlohmann::json to_json(const ElResiduals& res);
nlohmann::json to_json(const ElReport& rep);
nlohmann::json to_json(const CorollaryReport& rep);
nlohmann::json to_json(const std::vector<EigenPair>& pairs, WeightKind weight,
                       int mode);
nlohmann::json to_json(const StabilityReport& rep);

// Serialize and write with a trailing newline; parent directory must exist.
void write_json(const std::string& path, const nlohmann::json& doc);

}  // namespace membrane

#endif  // MEMBRANE_IO_HPP
