#ifndef IDEALKIT_JSON_IO_HPP
#define IDEALKIT_JSON_IO_HPP

#include <json.hpp>

#include "idealkit/pathology.hpp"
#include "idealkit/witness.hpp"

namespace idealkit {

using Json = nlohmann::ordered_json;

/// {"num":N,"den":D}, "inf", or {"num":N,"den":D,"root":Q}. Integers wider
/// than 64 bits fall back to decimal strings.
Json qvalue_to_json(const QValue& v);
QValue qvalue_from_json(const Json& j);

Json rational_to_json(const Rat& r);
Rat rational_from_json(const Json& j);

Json natset_to_json(const NatSet& s);
NatSet natset_from_json(const Json& j);
Json gridset_to_json(const GridSet& s);
GridSet gridset_from_json(const Json& j);
Json anyset_to_json(const AnySet& s);

/// [[members]...]; entries are naturals or [r,c] pairs.
template <class SetT>
Json family_to_json(const std::vector<SetT>& members);
std::vector<NatSet> nat_family_from_json(const Json& j);
std::vector<GridSet> grid_family_from_json(const Json& j);

template <class SetT>
Json certificate_to_json(const ObstructionCertificate<SetT>& cert);
/// Rebuilds a certificate from its JSON artifact; the embedded DSL text is
/// parsed at the given window.
ObstructionCertificate<NatSet> nat_certificate_from_json(const Json& j, Nat window);
ObstructionCertificate<GridSet> grid_certificate_from_json(const Json& j, Nat window);

Json pathology_report_to_json(const PathologyReport& report);

/// Re-checks a serialized envelope report: the witness must be exactly
/// feasible on every nonempty subset of the support and sum to the certified
/// value on the target.
bool pathology_report_revalidate(const Json& j, Nat window);

extern template Json family_to_json<NatSet>(const std::vector<NatSet>&);
extern template Json family_to_json<GridSet>(const std::vector<GridSet>&);
extern template Json certificate_to_json<NatSet>(const ObstructionCertificate<NatSet>&);
extern template Json certificate_to_json<GridSet>(const ObstructionCertificate<GridSet>&);

}  // namespace idealkit

#endif
