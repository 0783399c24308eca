#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asmplan/errors.hpp"
#include "asmplan/evaluation.hpp"

namespace asmplan {

inline constexpr std::size_t kDefaultMaxParts = 8;

struct PlannerOptions {
    bool exhaustive = false;  // evaluate every cell, no pruning
    bool memoize = true;      // reuse results keyed by (placed set, part)
    int threads = 1;
    std::size_t n_max = kDefaultMaxParts;
    bool force = false;       // ignore n_max
};

/// Throws TooManyParts when n > n_max and not forced.
void check_part_limit(std::size_t n, std::size_t n_max = kDefaultMaxParts, bool force = false);

/// Lexicographic permutations of 0..n-1. Throws TooManyParts when n > n_max.
std::vector<std::vector<std::size_t>> permutations(std::size_t n, std::size_t n_max = kDefaultMaxParts, bool force = false);
/// Same over ids (rows follow the lexicographic order of positions in `ids`).
std::vector<std::vector<std::string>> permutations(const std::vector<std::string>& ids,
                                                   std::size_t n_max = kDefaultMaxParts, bool force = false);

enum Stage : std::uint8_t { kStability = 1, kGraspability = 2, kAssemblability = 4 };

/// All quality evaluations for one (placed set, part) key.
struct StepRecord {
    std::uint8_t evaluated = 0;  // Stage bits
    double s = 0.0;
    double g = 0.0;
    double a = 0.0;
    Vec3 n_o = Vec3::Zero();
    std::optional<CaseLabel> label;
    bool floating = false;
    bool swept_blocked = false;
    std::vector<std::size_t> grasp_ids;  // accessible grasps, into Workspace::grasps(part)
};

struct QualityMatrices {
    std::vector<std::string> ids;
    std::vector<std::vector<std::size_t>> P;
    std::vector<std::vector<double>> S, G, A;
    std::vector<std::vector<Vec3>> Aprime;
    std::vector<std::vector<std::optional<CaseLabel>>> cases;
    std::vector<std::vector<std::uint8_t>> evaluated;  // Stage bits per cell
    std::vector<bool> m;

    std::size_t rows() const { return P.size(); }
    std::size_t cols() const { return ids.size(); }
    bool has(std::size_t r, std::size_t j, Stage s) const { return evaluated[r][j] & s; }
    /// min over evaluated cells of each quality; nullopt when none evaluated.
    std::optional<double> row_min(const std::vector<std::vector<double>>& M, std::size_t r, Stage s) const;
};

struct EvaluationStats {
    std::size_t cells_evaluated = 0;
    std::size_t rows_pruned = 0;
    std::size_t memo_hits = 0;
    std::size_t memo_entries = 0;
};

/// A zero-quality step: the ordered prefix placed before `part` and the stage that failed.
struct Infeasibility {
    std::vector<std::string> prefix;
    std::string part;
    std::string reason;  // "stability", "graspability" or "assemblability"
    std::optional<CaseLabel> label;  // contact case of `part`, also when an earlier stage failed
    bool floating = false;
    bool swept_blocked = false;
};

class EvaluationState {
public:
    const StepRecord* find(PartMask placed, std::size_t part) const;
    const StepRecord& store(PartMask placed, std::size_t part, StepRecord r);

    EvaluationStats stats;

private:
    std::map<std::pair<PartMask, std::size_t>, StepRecord> memo_;
};

struct Evaluation {
    QualityMatrices Q;
    EvaluationState state;
    std::vector<Infeasibility> failures;
};

/// Stages of one key, evaluated in order stability -> graspability ->
/// assemblability; unless `all_stages`, stops after the first zero.
StepRecord evaluate_step(const Workspace& ws, std::size_t part, PartMask placed, bool all_stages);

Evaluation evaluate_all(const Workspace& ws, const PlannerOptions& options = {});

/// Rows attaining the best min-product score, sorted by row. Throws
/// NoFeasibleSequence when no row is feasible.
std::vector<std::pair<std::size_t, double>> select_optimal(const QualityMatrices& Q);
double row_score(const QualityMatrices& Q, std::size_t r);

class NoFeasibleSequence : public Error {
public:
    explicit NoFeasibleSequence(std::vector<Infeasibility> report = {});
    const std::vector<Infeasibility>& report() const { return report_; }

private:
    std::vector<Infeasibility> report_;
};

struct PlanStep {
    std::string id;
    Vec3 direction = Vec3::Zero();
    double s = 0.0;
    std::size_t g = 0;
    double a = 0.0;
    std::optional<CaseLabel> label;
    std::vector<Grasp> grasps;  // world frame
};

struct PlanSettings {
    SamplerSettings sampler;
    Tolerances tolerances;
    GripperModel gripper;
    bool exhaustive = false;
};

struct AssemblyPlan {
    std::vector<std::string> order;
    std::vector<PlanStep> steps;
    double score = 0.0;
    std::vector<std::vector<std::string>> ties;  // every co-optimal order, including `order`
    PlanSettings settings;
};

/// Plan for row `r` of an evaluation.
AssemblyPlan plan_for_row(const Workspace& ws, const Evaluation& ev, std::size_t r,
                          const std::vector<std::pair<std::size_t, double>>& optimal, bool exhaustive);

AssemblyPlan plan(const AssemblyProblem& problem, const PlannerOptions& options = {});

/// Every co-optimal plan, first one equal to plan().
std::vector<AssemblyPlan> plan_all(const AssemblyProblem& problem, const PlannerOptions& options = {});

}  // namespace asmplan
