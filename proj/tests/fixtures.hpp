#pragma once

#include "debias/action_set.hpp"
#include "debias/instances.hpp"
#include "debias/rng.hpp"

#include <string>
#include <vector>

namespace fixtures {

using debias::Action;
using debias::ActionSet;
using debias::Vector;

inline ActionSet make(std::size_t d, std::vector<Action> actions) {
    ActionSet a;
    a.d = d;
    a.actions = std::move(actions);
    return a;
}

/// {(e1,+1), (-e1,+1), (e2,-1)}: groups cannot be separated through the origin.
inline ActionSet non_separable() { return make(2, {{{1, 0}, 1}, {{-1, 0}, 1}, {{0, 1}, -1}}); }

/// Gaussian covariates with random labels; both groups present and the
/// lifted vectors span R^{d+1}.
inline ActionSet random_valid(debias::SplitMix64& rng, std::size_t d, std::size_t k) {
    while (true) {
        ActionSet a;
        a.d = d;
        for (std::size_t i = 0; i < k; ++i) {
            Action act;
            for (std::size_t j = 0; j < d; ++j) act.x.push_back(rng.normal());
            act.z = rng.uniform() < 0.5 ? -1 : 1;
            a.actions.push_back(act);
        }
        if (debias::validate(a).empty()) return a;
    }
}

struct Named {
    std::string name;
    debias::ProblemInstance instance;
};

/// Generated problem instances used across tests.
inline std::vector<Named> instance_fixtures() {
    std::vector<Named> out;
    for (double kappa : {1.0, 4.0, 9.0}) {
        auto [p1, p2] = debias::worst_case_instance(kappa, 2, 4096);
        out.push_back({"worst-case k=" + std::to_string(kappa) + " alt1", p1});
        out.push_back({"worst-case k=" + std::to_string(kappa) + " alt2", p2});
    }
    {
        auto [p1, p2] = debias::worst_case_instance(4.0, 3, 4096);
        out.push_back({"worst-case k=4 d=3 alt1", p1});
        out.push_back({"worst-case k=4 d=3 alt2", p2});
    }
    for (int alt : {1, 2, 3}) out.push_back({"gap k=4 d=4 alt" + std::to_string(alt), debias::gap_instance(4.0, 4, 0.05, 0.1, alt)});
    out.push_back({"gap k=9 d=6 alt1", debias::gap_instance(9.0, 6, 0.05, 0.1, 1)});
    out.push_back({"small-d d=2 case2", debias::small_d_gap_instance(2, 2, 4.0, std::nullopt, 0.1)});
    out.push_back({"small-d d=3 case1", debias::small_d_gap_instance(3, 1, 1.0, 0.05, std::nullopt)});
    out.push_back({"small-d d=3 case2", debias::small_d_gap_instance(3, 2, 4.0, 0.05, 0.1)});
    return out;
}

}  // namespace fixtures
