#include "basinlab/metrics.hpp"

namespace basinlab {

NfeReport nfe_report(const std::vector<IterationTrace>& traces, const SystemModel* system,
                     std::optional<double> convergence_rate) {
    NfeReport report;
    report.convergence_rate = convergence_rate;
    report.rows.reserve(traces.size());
    for (const auto& t : traces) {
        NfeRow row;
        row.method = t.method;
        if (!t.points.empty()) row.x0 = t.points.front();
        row.nfe = t.nfe;
        row.iterations = t.iterations();
        row.outcome = t.outcome.kind;
        row.root_index = t.outcome.root_index;
        if (system && row.root_index >= 0 && static_cast<std::size_t>(row.root_index) < system->reference_roots().size()) {
            try {
                row.rho_avg = coc(t, system->reference_roots()[static_cast<std::size_t>(row.root_index)]).avg;
            } catch (const Error&) {
            }
        }
        try {
            row.rho_hat_avg = acoc(t).avg;
        } catch (const Error&) {
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace basinlab
