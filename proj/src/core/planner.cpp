#include "asmplan/planner.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace asmplan {
namespace {

std::size_t factorial(std::size_t n) {
    std::size_t f = 1;
    for (std::size_t k = 2; k <= n; ++k) f *= k;
    return f;
}

const char* stage_name(Stage s) {
    switch (s) {
        case kStability: return "stability";
        case kGraspability: return "graspability";
        case kAssemblability: return "assemblability";
    }
    return "?";
}

/// First stage with a zero value, or 0 when all evaluated stages are positive.
Stage first_zero(const StepRecord& r) {
    if ((r.evaluated & kStability) && r.s <= 0.0) return kStability;
    if ((r.evaluated & kGraspability) && r.g <= 0.0) return kGraspability;
    if ((r.evaluated & kAssemblability) && r.a <= 0.0) return kAssemblability;
    return Stage{0};
}

std::string describe(const std::vector<Infeasibility>& report) {
    std::ostringstream out;
    out << "no feasible assembly sequence";
    if (report.empty()) return out.str();
    out << " (" << report.size() << " failing step" << (report.size() == 1 ? "" : "s") << ")";
    for (std::size_t i = 0; i < std::min<std::size_t>(report.size(), 6); ++i) {
        const auto& f = report[i];
        out << "; [";
        for (std::size_t k = 0; k < f.prefix.size(); ++k) out << (k ? "," : "") << f.prefix[k];
        out << "] + " << f.part << ": zero " << f.reason;
        if (f.label) out << " (case " << case_letter(*f.label) << ")";
        if (f.floating) out << " (no contacts)";
        if (f.swept_blocked) out << " (approach blocked)";
    }
    if (report.size() > 6) out << "; ...";
    return out.str();
}

}  // namespace

void check_part_limit(std::size_t n, std::size_t n_max, bool force) {
    if (n > n_max && !force) {
        std::ostringstream msg;
        msg << n << " parts exceed the limit of " << n_max << ": the order search is O(n!) (" << n
            << "! rows); use --force to run anyway";
        throw TooManyParts(msg.str());
    }
}

std::vector<std::vector<std::size_t>> permutations(std::size_t n, std::size_t n_max, bool force) {
    if (n == 0) throw ValidationError("nothing to permute");
    check_part_limit(n, n_max, force);
    std::vector<std::size_t> row(n);
    std::iota(row.begin(), row.end(), 0);
    std::vector<std::vector<std::size_t>> out;
    out.reserve(factorial(n));
    do {
        out.push_back(row);
    } while (std::next_permutation(row.begin(), row.end()));
    return out;
}

std::vector<std::vector<std::string>> permutations(const std::vector<std::string>& ids, std::size_t n_max, bool force) {
    std::vector<std::vector<std::string>> out;
    for (const auto& row : permutations(ids.size(), n_max, force)) {
        std::vector<std::string> r;
        for (auto i : row) r.push_back(ids[i]);
        out.push_back(std::move(r));
    }
    return out;
}

std::optional<double> QualityMatrices::row_min(const std::vector<std::vector<double>>& M, std::size_t r, Stage s) const {
    std::optional<double> best;
    for (std::size_t j = 0; j < cols(); ++j) {
        if (!has(r, j, s)) continue;
        best = best ? std::min(*best, M[r][j]) : M[r][j];
    }
    return best;
}

const StepRecord* EvaluationState::find(PartMask placed, std::size_t part) const {
    const auto it = memo_.find({placed, part});
    return it == memo_.end() ? nullptr : &it->second;
}

const StepRecord& EvaluationState::store(PartMask placed, std::size_t part, StepRecord r) {
    auto [it, inserted] = memo_.try_emplace({placed, part}, std::move(r));
    if (inserted) ++stats.memo_entries;
    return it->second;
}

NoFeasibleSequence::NoFeasibleSequence(std::vector<Infeasibility> report)
    : Error(describe(report)), report_(std::move(report)) {}

StepRecord evaluate_step(const Workspace& ws, std::size_t part, PartMask placed, bool all_stages) {
    StepRecord r;
    r.s = step_stability(ws, part, placed).quality;
    r.evaluated |= kStability;
    if (r.s <= 0.0 && !all_stages) return r;

    auto g = step_graspability(ws, part, placed);
    r.g = static_cast<double>(g.count);
    r.grasp_ids = std::move(g.indices);
    r.evaluated |= kGraspability;
    if (r.g <= 0.0 && !all_stages) return r;

    const auto a = step_assemblability(ws, part, placed);
    r.a = a.direction.quality;
    r.n_o = a.direction.n_o;
    r.floating = a.floating;
    r.swept_blocked = a.direction.swept_blocked;
    if (!a.floating) r.label = a.direction.label;
    r.evaluated |= kAssemblability;
    return r;
}

Evaluation evaluate_all(const Workspace& ws, const PlannerOptions& options) {
    const std::size_t n = ws.size();
    Evaluation ev;
    auto& Q = ev.Q;
    for (std::size_t i = 0; i < n; ++i) Q.ids.push_back(ws.id(i));
    Q.P = permutations(n, options.n_max, options.force);
    const std::size_t rows = Q.P.size();
    Q.S.assign(rows, std::vector<double>(n, 0.0));
    Q.G = Q.S;
    Q.A = Q.S;
    Q.Aprime.assign(rows, std::vector<Vec3>(n, Vec3::Zero()));
    Q.cases.assign(rows, std::vector<std::optional<CaseLabel>>(n));
    Q.evaluated.assign(rows, std::vector<std::uint8_t>(n, 0));
    Q.m.assign(rows, true);

    if (options.threads > 1) ws.prepare_grasps(options.threads);

    // Exhaustive runs need every key, so they can be filled concurrently and
    // replayed in row order below.
    if (options.exhaustive && options.memoize && options.threads > 1 && n < 20) {
        std::vector<std::pair<PartMask, std::size_t>> keys;
        for (PartMask mask = 0; mask < (PartMask{1} << n); ++mask) {
            for (std::size_t p = 0; p < n; ++p) {
                if (!(mask >> p & 1)) keys.emplace_back(mask, p);
            }
        }
        std::vector<StepRecord> results(keys.size());
        std::atomic<std::size_t> next{0};
        {
            std::vector<std::jthread> pool;
            for (int w = 0; w < options.threads; ++w) {
                pool.emplace_back([&] {
                    for (std::size_t k = next++; k < keys.size(); k = next++) {
                        results[k] = evaluate_step(ws, keys[k].second, keys[k].first, true);
                    }
                });
            }
        }
        for (std::size_t k = 0; k < keys.size(); ++k) ev.state.store(keys[k].first, keys[k].second, std::move(results[k]));
    }

    std::set<std::pair<std::vector<std::string>, std::string>> reported;
    for (std::size_t r = 0; r < rows; ++r) {
        if (!Q.m[r] && !options.exhaustive) continue;
        PartMask placed = 0;
        bool row_failed = false;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t part = Q.P[r][j];
            StepRecord fresh;
            const StepRecord* rec = options.memoize ? ev.state.find(placed, part) : nullptr;
            if (rec) {
                ++ev.state.stats.memo_hits;
            } else {
                fresh = evaluate_step(ws, part, placed, options.exhaustive);
                rec = options.memoize ? &ev.state.store(placed, part, std::move(fresh)) : &fresh;
            }

            Q.evaluated[r][j] = rec->evaluated;
            Q.S[r][j] = rec->s;
            Q.G[r][j] = rec->g;
            Q.A[r][j] = rec->a;
            Q.Aprime[r][j] = rec->n_o;
            Q.cases[r][j] = rec->label;
            ++ev.state.stats.cells_evaluated;

            const Stage zero = first_zero(*rec);
            if (zero) {
                if (!row_failed) {
                    Infeasibility f;
                    for (std::size_t k = 0; k < j; ++k) f.prefix.push_back(ws.id(Q.P[r][k]));
                    f.part = ws.id(part);
                    f.reason = stage_name(zero);
                    if (rec->evaluated & kAssemblability) {
                        f.label = rec->label;
                        f.floating = rec->floating;
                        f.swept_blocked = rec->swept_blocked;
                    } else {
                        // Diagnosis only: the contact case of a step that failed earlier.
                        const auto a = step_assemblability(ws, part, placed);
                        if (!a.floating) f.label = a.direction.label;
                        f.floating = a.floating;
                        f.swept_blocked = a.direction.swept_blocked;
                    }
                    if (reported.insert({f.prefix, f.part}).second) ev.failures.push_back(std::move(f));
                }
                row_failed = true;
                if (!options.exhaustive) {
                    // Every row sharing this length-(j+1) prefix is a contiguous,
                    // aligned block in lexicographic order.
                    const std::size_t block = factorial(n - j - 1);
                    const std::size_t start = r - r % block;
                    for (std::size_t k = start; k < start + block; ++k) {
                        if (Q.m[k]) {
                            Q.m[k] = false;
                            ++ev.state.stats.rows_pruned;
                        }
                    }
                    break;
                }
                Q.m[r] = false;
            }
            placed |= PartMask{1} << part;
        }
    }
    return ev;
}

double row_score(const QualityMatrices& Q, std::size_t r) {
    const auto s = Q.row_min(Q.S, r, kStability);
    const auto g = Q.row_min(Q.G, r, kGraspability);
    const auto a = Q.row_min(Q.A, r, kAssemblability);
    if (!s || !g || !a) return 0.0;
    return *s * *g * *a;
}

std::vector<std::pair<std::size_t, double>> select_optimal(const QualityMatrices& Q) {
    std::vector<std::pair<std::size_t, double>> scored;
    for (std::size_t r = 0; r < Q.rows(); ++r) {
        if (Q.m[r]) scored.emplace_back(r, row_score(Q, r));
    }
    if (scored.empty()) throw NoFeasibleSequence();
    double best = 0.0;
    for (const auto& [r, s] : scored) best = std::max(best, s);
    std::vector<std::pair<std::size_t, double>> out;
    for (const auto& [r, s] : scored) {
        if (s >= best * (1.0 - 1e-9)) out.emplace_back(r, s);
    }
    return out;
}

AssemblyPlan plan_for_row(const Workspace& ws, const Evaluation& ev, std::size_t r,
                          const std::vector<std::pair<std::size_t, double>>& optimal, bool exhaustive) {
    const auto& Q = ev.Q;
    AssemblyPlan plan;
    plan.score = row_score(Q, r);
    PartMask placed = 0;
    for (std::size_t j = 0; j < Q.cols(); ++j) {
        const std::size_t part = Q.P[r][j];
        StepRecord fresh;
        const StepRecord* rec = ev.state.find(placed, part);
        if (!rec) {
            fresh = evaluate_step(ws, part, placed, true);
            rec = &fresh;
        }
        PlanStep step;
        step.id = ws.id(part);
        step.direction = rec->n_o;
        step.s = rec->s;
        step.g = rec->grasp_ids.size();
        step.a = rec->a;
        step.label = rec->label;
        const auto& local = ws.grasps(part);
        for (auto gi : rec->grasp_ids) step.grasps.push_back(local[gi].transformed(ws.pose(part)));
        plan.order.push_back(step.id);
        plan.steps.push_back(std::move(step));
        placed |= PartMask{1} << part;
    }
    for (const auto& [row, score] : optimal) {
        std::vector<std::string> ids;
        for (auto p : Q.P[row]) ids.push_back(ws.id(p));
        plan.ties.push_back(std::move(ids));
    }
    const auto& problem = ws.problem();
    plan.settings = {problem.sampler, problem.tolerances, problem.gripper, exhaustive};
    return plan;
}

namespace {

std::vector<AssemblyPlan> run(const AssemblyProblem& problem, const PlannerOptions& options, bool all) {
    const Workspace ws(problem);
    const Evaluation ev = evaluate_all(ws, options);
    std::vector<std::pair<std::size_t, double>> optimal;
    try {
        optimal = select_optimal(ev.Q);
    } catch (const NoFeasibleSequence&) {
        throw NoFeasibleSequence(ev.failures);
    }
    std::vector<AssemblyPlan> plans;
    for (std::size_t k = 0; k < (all ? optimal.size() : 1); ++k) {
        plans.push_back(plan_for_row(ws, ev, optimal[k].first, optimal, options.exhaustive));
    }
    return plans;
}

}  // namespace

AssemblyPlan plan(const AssemblyProblem& problem, const PlannerOptions& options) {
    return run(problem, options, false).front();
}

std::vector<AssemblyPlan> plan_all(const AssemblyProblem& problem, const PlannerOptions& options) {
    return run(problem, options, true);
}

}  // namespace asmplan
