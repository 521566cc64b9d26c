#include "ttsvd/report_json.hpp"

#include <json.hpp>

namespace ttsvd {

namespace {

nlohmann::json to_array(const Vector& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

}  // namespace

std::string report_to_json(const SweepReport& report, const Vector& sigma, int indent) {
    nlohmann::json micro = nlohmann::json::array();
    for (const MicroRecord& m : report.micro) {
        micro.push_back({
            {"position", m.position},
            {"direction", m.direction == HalfSweep::right_to_left ? "right-to-left" : "left-to-right"},
            {"rank_u", m.rank_u},
            {"rank_v", m.rank_v},
            {"sigma", to_array(m.sigma)},
            {"local_iterations", m.local_iterations},
            {"local_converged", m.local_converged},
        });
    }
    nlohmann::json doc = {
        {"solver", report.solver},
        {"sigma", to_array(sigma)},
        {"termination", to_string(report.termination)},
        {"sweeps", report.sweeps},
        {"restarts", report.restarts},
        {"local_failures", report.local_failures},
        {"seconds", report.seconds},
        {"final_residual", report.final_residual},
        {"residuals", report.residuals},
        {"ranks_u", report.ranks_u},
        {"ranks_v", report.ranks_v},
        {"micro", micro},
    };
    return doc.dump(indent);
}

}  // namespace ttsvd
