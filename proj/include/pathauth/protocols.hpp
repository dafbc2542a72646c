#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pathauth/protocols/burbridge.hpp"
#include "pathauth/protocols/checker.hpp"
#include "pathauth/protocols/ray.hpp"
#include "pathauth/protocols/resc.hpp"
#include "pathauth/protocols/rfchain.hpp"
#include "pathauth/protocols/stepauth.hpp"
#include "pathauth/protocols/tracker.hpp"

namespace pathauth {

/// Protocol names in report order.
inline const std::vector<std::string>& protocol_names() {
    static const std::vector<std::string> names{"burbridge", "rfchain", "resc", "stepauth", "ray", "tracker", "checker"};
    return names;
}

inline std::unique_ptr<ProtocolModel> make_protocol(const std::string& name) {
    if (name == "tracker") return std::make_unique<TrackerModel>();
    if (name == "checker") return std::make_unique<CheckerModel>();
    if (name == "stepauth") return std::make_unique<StepAuthModel>();
    if (name == "rfchain") return std::make_unique<RfChainModel>();
    if (name == "ray") return std::make_unique<RayModel>();
    if (name == "resc") return std::make_unique<ReScModel>();
    if (name == "burbridge") return std::make_unique<BurbridgeModel>();
    throw UsageError("unknown protocol '" + name + "'");
}

} // namespace pathauth
