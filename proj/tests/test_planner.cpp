#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "asmplan/errors.hpp"
#include "asmplan/fixtures.hpp"
#include "asmplan/planner.hpp"
#include "support.hpp"

using namespace asmplan;
using testing::Rng;

namespace {

std::size_t factorial(std::size_t n) { return n <= 1 ? 1 : n * factorial(n - 1); }

Evaluation run(const AssemblyProblem& p, bool exhaustive, bool memo = true, int threads = 1) {
    const Workspace ws(p);
    PlannerOptions o;
    o.exhaustive = exhaustive;
    o.memoize = memo;
    o.threads = threads;
    return evaluate_all(ws, o);
}

// Independent min-product over fully evaluated rows.
std::vector<double> brute_scores(const QualityMatrices& Q) {
    std::vector<double> out;
    for (std::size_t r = 0; r < Q.rows(); ++r) {
        double s = 1e300, g = 1e300, a = 1e300;
        bool zero = false;
        for (std::size_t j = 0; j < Q.cols(); ++j) {
            s = std::min(s, Q.S[r][j]);
            g = std::min(g, Q.G[r][j]);
            a = std::min(a, Q.A[r][j]);
            zero = zero || Q.S[r][j] <= 0 || Q.G[r][j] <= 0 || Q.A[r][j] <= 0;
        }
        out.push_back(zero ? 0.0 : s * g * a);
    }
    return out;
}

void check_cells_equal(const QualityMatrices& a, const QualityMatrices& b, std::size_t r, std::size_t j) {
    CHECK(a.S[r][j] == b.S[r][j]);
    CHECK(a.G[r][j] == b.G[r][j]);
    CHECK(a.A[r][j] == b.A[r][j]);
    CHECK(a.Aprime[r][j] == b.Aprime[r][j]);
    CHECK(a.cases[r][j] == b.cases[r][j]);
}

QualityMatrices hand_matrices(std::vector<std::vector<double>> S, std::vector<std::vector<double>> G,
                              std::vector<std::vector<double>> A) {
    QualityMatrices Q;
    const std::size_t rows = S.size(), cols = S.front().size();
    for (std::size_t j = 0; j < cols; ++j) Q.ids.push_back(std::string(1, static_cast<char>('a' + j)));
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<std::size_t> row(cols);
        for (std::size_t j = 0; j < cols; ++j) row[j] = (j + r) % cols;
        Q.P.push_back(row);
    }
    Q.S = std::move(S);
    Q.G = std::move(G);
    Q.A = std::move(A);
    Q.Aprime.assign(rows, std::vector<Vec3>(cols, Vec3::UnitZ()));
    Q.cases.assign(rows, std::vector<std::optional<CaseLabel>>(cols));
    Q.evaluated.assign(rows, std::vector<std::uint8_t>(cols, kStability | kGraspability | kAssemblability));
    Q.m.assign(rows, true);
    return Q;
}

}  // namespace

TEST_CASE("permutations") {
    const auto rows = permutations(std::vector<std::string>{"Z", "T", "Tri"});
    CHECK(rows.size() == 6);
    CHECK(std::set(rows.begin(), rows.end()).size() == 6);
    CHECK(rows.front() == std::vector<std::string>{"Z", "T", "Tri"});
    CHECK(rows.back() == std::vector<std::string>{"Tri", "T", "Z"});
    CHECK(permutations(std::vector<std::string>{"A"}) == std::vector<std::vector<std::string>>{{"A"}});
    const auto four = permutations(4);
    CHECK(four.size() == 24);
    CHECK(std::set(four.begin(), four.end()).size() == 24);
    CHECK(std::is_sorted(four.begin(), four.end()));
    CHECK_THROWS_AS(permutations(9), TooManyParts);
    CHECK_THROWS_AS(permutations(4, 3), TooManyParts);
    CHECK(permutations(4, 3, true).size() == 24);
    try {
        permutations(9);
    } catch (const TooManyParts& e) {
        CHECK(std::string(e.what()).find("O(n!)") != std::string::npos);
    }
}

TEST_CASE("min-product selection on a hand matrix") {
    const auto Q = hand_matrices({{.5, .4}, {.5, .2}}, {{3, 2}, {9, 9}}, {{100, 1}, {100, 1}});
    CHECK(row_score(Q, 0) == doctest::Approx(0.8));
    CHECK(row_score(Q, 1) == doctest::Approx(1.8));
    const auto best = select_optimal(Q);
    REQUIRE(best.size() == 1);
    CHECK(best[0].first == 1);
}

TEST_CASE("ties are all returned in row order") {
    const auto Q = hand_matrices({{.5, .5}, {.5, .5}, {.5, .1}}, {{4, 4}, {4, 4}, {4, 4}}, {{2, 2}, {2, 2}, {2, 2}});
    const auto best = select_optimal(Q);
    REQUIRE(best.size() == 2);
    CHECK(best[0].first == 0);
    CHECK(best[1].first == 1);
}

TEST_CASE("all rows infeasible") {
    auto Q = hand_matrices({{.5, .5}}, {{4, 4}}, {{2, 2}});
    Q.m[0] = false;
    CHECK_THROWS_AS(select_optimal(Q), NoFeasibleSequence);
}

TEST_CASE("raising a non-minimum cell leaves the score unchanged") {
    Rng rng(61);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::vector<double>> S{{}}, G{{}}, A{{}};
        for (int j = 0; j < 4; ++j) {
            S[0].push_back(rng.uniform(0.05, 1));
            G[0].push_back(rng.integer(1, 300));
            A[0].push_back(std::vector<double>{1, 2, 3, 10, 100}[rng.integer(0, 4)]);
        }
        auto Q = hand_matrices(S, G, A);
        const double before = row_score(Q, 0);
        std::vector<double>* stages[] = {&Q.S[0], &Q.G[0], &Q.A[0]};
        auto& M = *stages[rng.integer(0, 2)];
        const auto argmin = std::min_element(M.begin(), M.end()) - M.begin();
        const int j = rng.integer(0, 3);
        if (j == argmin || M[j] == M[argmin]) continue;
        M[j] *= rng.uniform(1, 10);
        CHECK(row_score(Q, 0) == before);
    }
}

TEST_CASE("pruned evaluation equals exhaustive on feasible rows") {
    for (const char* name : {"stack3", "soma3", "soma4", "nosolution3", "pocket", "handle_hole"}) {
        CAPTURE(name);
        const auto problem = make_scene(name);
        const auto pruned = run(problem, false), full = run(problem, true);
        const auto& P = pruned.Q;
        const auto& F = full.Q;
        REQUIRE(P.rows() == factorial(problem.size()));
        for (std::size_t r = 0; r < P.rows(); ++r) {
            CHECK(P.m[r] == F.m[r]);
            for (std::size_t j = 0; j < P.cols(); ++j) {
                // every evaluated stage of a pruned cell carries the exhaustive value
                if (P.has(r, j, kStability)) CHECK(P.S[r][j] == F.S[r][j]);
                if (P.has(r, j, kGraspability)) CHECK(P.G[r][j] == F.G[r][j]);
                if (P.has(r, j, kAssemblability)) CHECK(P.A[r][j] == F.A[r][j]);
                if (F.m[r]) {
                    CHECK(P.evaluated[r][j] == (kStability | kGraspability | kAssemblability));
                    check_cells_equal(P, F, r, j);
                }
            }
            if (P.m[r]) CHECK(row_score(P, r) == row_score(F, r));
        }
    }
}

TEST_CASE("every pruned row shares a prefix with a zero cell") {
    for (const char* name : {"soma3", "soma4", "nosolution3"}) {
        CAPTURE(name);
        const auto ev = run(make_scene(name), false);
        const auto& Q = ev.Q;
        std::set<std::vector<std::size_t>> zero_prefixes;
        for (std::size_t r = 0; r < Q.rows(); ++r) {
            for (std::size_t j = 0; j < Q.cols(); ++j) {
                const bool zero = (Q.has(r, j, kStability) && Q.S[r][j] <= 0) ||
                                  (Q.has(r, j, kGraspability) && Q.G[r][j] <= 0) ||
                                  (Q.has(r, j, kAssemblability) && Q.A[r][j] <= 0);
                if (zero) zero_prefixes.insert({Q.P[r].begin(), Q.P[r].begin() + static_cast<long>(j) + 1});
            }
        }
        for (std::size_t r = 0; r < Q.rows(); ++r) {
            if (Q.m[r]) continue;
            bool shared = false;
            for (std::size_t len = 1; len <= Q.cols(); ++len) {
                shared = shared || zero_prefixes.contains({Q.P[r].begin(), Q.P[r].begin() + static_cast<long>(len)});
            }
            CHECK(shared);
        }
    }
}

TEST_CASE("an infeasible prefix stops every row that shares it") {
    const auto problem = make_scene("soma4");
    const auto ev = run(problem, false);
    const auto& Q = ev.Q;
    const std::size_t n = Q.cols();
    for (std::size_t r = 0; r < Q.rows(); ++r) {
        for (std::size_t j = 0; j < n; ++j) {
            const bool zero = (Q.has(r, j, kStability) && Q.S[r][j] <= 0) ||
                              (Q.has(r, j, kGraspability) && Q.G[r][j] <= 0) ||
                              (Q.has(r, j, kAssemblability) && Q.A[r][j] <= 0);
            if (!zero) continue;
            std::size_t sharing = 0;
            for (std::size_t k = 0; k < Q.rows(); ++k) {
                if (!std::equal(Q.P[k].begin(), Q.P[k].begin() + static_cast<long>(j) + 1, Q.P[r].begin())) continue;
                ++sharing;
                CHECK_FALSE(Q.m[k]);
                for (std::size_t c = j + 1; c < n; ++c) CHECK(Q.evaluated[k][c] == 0);
            }
            CHECK(sharing == factorial(n - j - 1));
        }
    }
}

TEST_CASE("work bound") {
    for (const char* name : {"stack3", "soma3", "soma4"}) {
        const auto problem = make_scene(name);
        const auto ev = run(problem, false, false);
        const std::size_t n = problem.size();
        CHECK(ev.state.stats.cells_evaluated <= n * factorial(n));
    }
    // the top cube cannot go first, so every row starting with it is pruned
    const auto stack = run(make_scene("stack3"), false);
    CHECK(stack.state.stats.rows_pruned >= factorial(2));
}

TEST_CASE("memoised evaluation equals fresh evaluation") {
    for (const char* name : {"soma3", "soma4", "stack3"}) {
        CAPTURE(name);
        const auto problem = make_scene(name);
        for (bool exhaustive : {false, true}) {
            const auto a = run(problem, exhaustive, true), b = run(problem, exhaustive, false);
            CHECK(a.Q.m == b.Q.m);
            CHECK(a.Q.evaluated == b.Q.evaluated);
            for (std::size_t r = 0; r < a.Q.rows(); ++r)
                for (std::size_t j = 0; j < a.Q.cols(); ++j) check_cells_equal(a.Q, b.Q, r, j);
            if (!exhaustive) CHECK(a.state.stats.memo_hits > 0);
        }
    }
}

TEST_CASE("thread count does not change the result") {
    const auto problem = make_scene("soma4");
    for (bool exhaustive : {false, true}) {
        const auto a = run(problem, exhaustive, true, 1), b = run(problem, exhaustive, true, 4);
        CHECK(a.Q.m == b.Q.m);
        CHECK(a.Q.evaluated == b.Q.evaluated);
        for (std::size_t r = 0; r < a.Q.rows(); ++r)
            for (std::size_t j = 0; j < a.Q.cols(); ++j) check_cells_equal(a.Q, b.Q, r, j);
    }
}

TEST_CASE("single part") {
    auto problem = make_scene("stack3");
    problem.parts.erase(problem.parts.begin() + 1, problem.parts.end());
    const auto ev = run(problem, false);
    CHECK(ev.Q.rows() == 1);
    CHECK(ev.Q.cols() == 1);
    CHECK(ev.Q.m == std::vector<bool>{true});
    const auto p = plan(problem);
    CHECK(p.order == std::vector<std::string>{"base"});
}

TEST_CASE("two-part stack goes bottom first") {
    auto problem = make_scene("stack3");
    problem.parts.pop_back();
    const auto ev = run(problem, true);
    CHECK(ev.Q.m == std::vector<bool>{true, false});
    CHECK(plan(problem).order == std::vector<std::string>{"base", "middle"});
}

TEST_CASE("plans match the exhaustive argmax") {
    for (const char* name : {"stack3", "soma3", "soma4", "pocket", "handle_hole"}) {
        CAPTURE(name);
        const auto problem = make_scene(name);
        const auto full = run(problem, true);
        const auto scores = brute_scores(full.Q);
        const auto best = std::max_element(scores.begin(), scores.end()) - scores.begin();
        const auto p = plan(problem);
        std::vector<std::string> expected;
        for (auto i : full.Q.P[best]) expected.push_back(problem.parts[i].id);
        CHECK(p.order == expected);

        double s = 1e300, a = 1e300;
        std::size_t g = SIZE_MAX;
        for (const auto& step : p.steps) {
            CHECK(step.s > 0);
            CHECK(step.g >= 1);
            CHECK(step.a >= 1);
            CHECK(step.grasps.size() == step.g);
            CHECK(std::abs(step.direction.norm() - 1) < 1e-9);
            s = std::min(s, step.s);
            g = std::min(g, step.g);
            a = std::min(a, step.a);
        }
        CHECK(p.score == doctest::Approx(s * static_cast<double>(g) * a).epsilon(1e-12));
        CHECK(p.score == doctest::Approx(scores[best]).epsilon(1e-12));
        CHECK(std::find(p.ties.begin(), p.ties.end(), p.order) != p.ties.end());
    }
}

TEST_CASE("plan grasps are the accessible grasps in world coordinates") {
    const auto problem = make_scene("stack3");
    const auto p = plan(problem);
    const Workspace ws(problem);
    for (std::size_t k = 0; k < p.steps.size(); ++k) {
        const auto part = *problem.index_of(p.steps[k].id);
        std::vector<std::size_t> placed;
        for (std::size_t j = 0; j < k; ++j) placed.push_back(*problem.index_of(p.order[j]));
        std::vector<Grasp> world;
        accessible_grasps(ws.grasps(part), ws.pose(part), problem.gripper, ws.obstacles(mask_of(placed)), true,
                          problem.tolerances.delta_c, &world);
        CHECK(world == p.steps[k].grasps);
    }
}

TEST_CASE("symmetric pair reports both orders") {
    const auto all = plan_all(make_scene("sym2"));
    REQUIRE(all.size() == 2);
    CHECK(all[0].ties.size() == 2);
    CHECK(all[0].order != all[1].order);
    CHECK(all[0].score == doctest::Approx(all[1].score).epsilon(1e-9));
}

TEST_CASE("relabeling parts permutes rows but keeps the scores") {
    const auto problem = make_scene("soma3");
    AssemblyProblem shuffled = problem;
    std::reverse(shuffled.parts.begin(), shuffled.parts.end());
    auto a = brute_scores(run(problem, true).Q), b = brute_scores(run(shuffled, true).Q);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    CHECK(plan(problem).order == plan(shuffled).order);
}

TEST_CASE("infeasible scenes report every failing prefix") {
    try {
        plan(make_scene("nosolution3"));
        FAIL("expected no solution");
    } catch (const NoFeasibleSequence& e) {
        REQUIRE_FALSE(e.report().empty());
        for (const auto& f : e.report()) {
            CHECK_FALSE(f.part.empty());
            CHECK((f.reason == "stability" || f.reason == "graspability" || f.reason == "assemblability"));
        }
        CHECK(std::string(e.what()).find("peg") != std::string::npos);
    }
    try {
        plan(make_scene("enclosure"));
        FAIL("expected no solution");
    } catch (const NoFeasibleSequence& e) {
        bool named = false;
        for (const auto& f : e.report()) named = named || (f.part == "core" && f.label == CaseLabel::I_polyhedron_origin_inside);
        CHECK(named);
    }
}
