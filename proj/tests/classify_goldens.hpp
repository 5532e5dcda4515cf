#pragma once

// Golden classification scenarios shared by the classifier unit tests and the
// acceptance gate. Each entry drives one terminal of a decision chart (or one
// refusal path) with the synthetic all-ones constants and pins the complete
// JSON output, hand-encoded. Numeric leaves are compared with a relative
// tolerance of 1e-9; everything else must match exactly.

#include <coexscale/classify.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace coex_test {

struct GoldenScenario {
    std::string name;
    coex::PotentialSpec spec;
    coex::ThetaExpansion theta;
    std::string expected_json;
};

// Degree-4 pitchfork driver: a1' = -1, a3 = 1, asymmetry controlled by a4.
inline coex::PotentialSpec pitch_wn(double a4) {
    coex::PotentialSpec p;
    p.regime = coex::Regime::weakly_nonlinear;
    p.degree = 4;
    p.coeffs = {{0, 0, 0}, {0, -1, 0}, {0, 0, 0}, {1, 0, 0}, {a4, 0, 0}};
    return p;
}

inline coex::PotentialSpec stable_wn() {
    coex::PotentialSpec p;
    p.regime = coex::Regime::weakly_nonlinear;
    p.degree = 4;
    p.coeffs = {{0, 0, 0}, {1, 0, 0}, {0, 0, 0}, {1, 0, 0}, {0, 0, 0}};
    return p;
}

inline coex::PotentialSpec saddle_wn() {
    coex::PotentialSpec p;
    p.regime = coex::Regime::weakly_nonlinear;
    p.degree = 4;
    p.coeffs = {{0, 1, 0}, {0, 0, 0}, {1, 0, 0}, {1, 0, 0}, {0, 0, 0}};
    return p;
}

// Degree-6 weak-noise pitchfork: a1' = -1, a3 = 1, so B = a4 + a2p.
inline coex::PotentialSpec noise_spec(double a4, double a2p) {
    coex::PotentialSpec p;
    p.regime = coex::Regime::weak_noise;
    p.degree = 6;
    p.coeffs = {{0, 0, 0}, {0, -1, 0}, {0, a2p, 0}, {1, 0, 0},
                {a4, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    return p;
}

inline coex::ThetaExpansion th(std::vector<coex::ThetaTerm> terms) {
    return coex::ThetaExpansion{std::move(terms)};
}

inline coex::Classification run_scenario(const GoldenScenario& g) {
    const auto k = coex::ClassifierConstants::synthetic();
    return g.spec.regime == coex::Regime::weakly_nonlinear
               ? coex::classify_weakly_nonlinear(g.spec, g.theta, k)
               : coex::classify_weak_noise(g.spec, g.theta, k);
}

// Structural JSON comparison with relative tolerance on numeric leaves.
inline bool json_close(const nlohmann::json& a, const nlohmann::json& b, double rel = 1e-9) {
    if (a.is_number() && b.is_number()) {
        const double x = a.get<double>();
        const double y = b.get<double>();
        return std::abs(x - y) <= rel * std::max({1.0, std::abs(x), std::abs(y)});
    }
    if (a.type() != b.type()) return false;
    if (a.is_object()) {
        if (a.size() != b.size()) return false;
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key())) return false;
            if (!json_close(it.value(), b.at(it.key()), rel)) return false;
        }
        return true;
    }
    if (a.is_array()) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!json_close(a[i], b[i], rel)) return false;
        return true;
    }
    return a == b;
}

inline const std::vector<GoldenScenario>& golden_scenarios() {
    using R = coex::Rational;
    static const std::vector<GoldenScenario> table = [] {
        std::vector<GoldenScenario> t;
        const double rho2s = 3.9311120913133449;
        const double rho3s = 6.8682854553199912;

        t.push_back({"wn-symmetric-quartic", pitch_wn(0.0), th({{2.0, R(1)}}), R"j({
  "A": 0.0,
  "bifurcation": {"near_tolerance": false, "type": "pitchfork",
    "witnesses": {"a1": 0.0, "a0'": 0.0, "a2": 0.0, "a1'": -1.0, "a3": 1.0}},
  "branches": [
    {"alpha": "1", "coefficient": 1.0, "family": "Phi4", "h": {"coef": 0.0, "power": "0"},
     "parameter": {"name": "lambda", "value": 2.0}, "stability": null}
  ],
  "regime": "weakly_nonlinear",
  "status": "classified",
  "theta_tuned": [
    {"coef": -18.0, "log": true, "power": "1"},
    {"coef": 2.0, "log": false, "parameter": "lambda", "power": "1"}
  ],
  "warnings": []
})j"});

        t.push_back({"wn-shallow-pair", pitch_wn(1.0 / 12.0), th({{1.0, R(1, 2)}}), R"j({
  "A": 2.0,
  "bifurcation": {"near_tolerance": false, "type": "pitchfork",
    "witnesses": {"a1": 0.0, "a0'": 0.0, "a2": 0.0, "a1'": -1.0, "a3": 1.0}},
  "branches": [
    {"alpha": "3/4", "coefficient": 2.0, "family": "OU_stable", "h": null, "parameter": null, "stability": "stable"},
    {"alpha": "3/4", "coefficient": -1.0, "family": "OU_unstable", "h": null, "parameter": null, "stability": "unstable"},
    {"alpha": "3/4", "coefficient": 2.0, "family": "OU_stable", "h": null, "parameter": null, "stability": "stable"}
  ],
  "regime": "weakly_nonlinear",
  "rho_star": 3.0,
  "status": "classified",
  "warnings": ["the two stable branches arise from opposite shifts and share the same limiting coefficients"]
})j"});

        t.push_back({"wn-steep-single", pitch_wn(1.0 / 12.0), th({{1.0, R(1)}}), R"j({
  "A": 2.0,
  "bifurcation": {"near_tolerance": false, "type": "pitchfork",
    "witnesses": {"a1": 0.0, "a0'": 0.0, "a2": 0.0, "a1'": -1.0, "a3": 1.0}},
  "branches": [
    {"alpha": "5/6", "coefficient": 4.7622031559045984, "family": "OU_stable", "h": null, "parameter": null, "stability": "stable"}
  ],
  "regime": "weakly_nonlinear",
  "rho_star": 3.0,
  "status": "classified",
  "warnings": []
})j"});

        t.push_back({"wn-critical-exact", pitch_wn(1.0 / 12.0), th({{3.0, R(2, 3)}}), R"j({
  "A": 2.0,
  "bifurcation": {"near_tolerance": false, "type": "pitchfork",
    "witnesses": {"a1": 0.0, "a0'": 0.0, "a2": 0.0, "a1'": -1.0, "a3": 1.0}},
  "branches": [
    {"alpha": "8/9", "coefficient": 3.0, "family": "Phi3", "h": {"coef": -1.0, "power": "1/3"}, "parameter": null, "stability": null},
    {"alpha": "5/6", "coefficient": 9.0, "family": "OU_stable", "h": {"coef": 2.0, "power": "1/3"}, "parameter": null, "stability": "stable"}
  ],
  "regime": "weakly_nonlinear",
  "rho_star": 3.0,
  "status": "classified",
  "warnings": []
})j"});

        t.push_back({"wn-critical-sub", pitch_wn(1.0 / 12.0), th({{2.0, R(2, 3)}}), R"j({
  "A": 2.0,
  "bifurcation": {"near_tolerance": false, "type": "pitchfork",
    "witnesses": {"a1": 0.0, "a0'": 0.0, "a2": 0.0, "a1'": -1.0, "a3": 1.0}},
  "branches": [
    {"alpha": "5/6", "coefficient": 7.3911863043018364, "family": "OU_stable",
     "h": {"coef": 1.7692923542386314, "power": "1/3"}, "parameter": null, "stability": "stable"}
  ],
  "regime": "weakly_nonlinear",
  "rho_star": 3.0,
  "status": "classified",
  "warnings": []
})j"});

        t.push_back({"wn-critical-super", pitch_wn(1.0 / 12.0), th({{4.0, R(2, 3)}}), R"j({
  "A": 2.0,
  "bifurcation": {"near_tolerance": false, "type": "pitchfork",
    "witnesses": {"a1": 0.0, "a0'": 0.0, "a2": 0.0, "a1'": -1.0, "a3": 1.0}},
  "branches": [
    {"alpha": "5/6", "coefficient": 4.4181903005761087, "family": "OU_stable",
     "h": {"coef": -1.6751308705666461, "power": "1/3"}, "parameter": null, "stability": "stable"},
    {"alpha": "5/6", "coefficient": -3.1278260783107685, "family": "OU_unstable",
     "h": {"coef": -0.53918887281088912, "power": "1/3"}, "parameter": null, "stability": "unstable"},
    {"alpha": "5/6", "coefficient": 10.70963577773466, "family": "OU_stable",
     "h": {"coef": 2.2143197433775352, "power": "1/3"}, "parameter": null, "stability": "stable"}
  ],
  "regime": "weakly_nonlinear",
  "rho_star": 3.0,
  "status": "classified",
  "warnings": []
})j"});

        t.push_back({"wn-refined-shallow", pitch_wn(1.0 / 12.0),
                     th({{3.0, R(2, 3)}, {1.0, R(3, 4)}}), R"j({
  "A": 2.0,
  "bifurcation": {"near_tolerance": false, "type": "pitchfork",
    "witnesses": {"a1": 0.0, "a0'": 0.0, "a2": 0.0, "a1'": -1.0, "a3": 1.0}},
  "branches": [
    {"alpha": "41/48", "coefficient": "unspecified-by-paper", "family": "OU_stable", "h": null, "parameter": null, "stability": "stable"},
    {"alpha": "41/48", "coefficient": "unspecified-by-paper", "family": "OU_unstable", "h": null, "parameter": null, "stability": "unstable"},
    {"alpha": "5/6", "coefficient": "unspecified-by-paper", "family": "OU_stable", "h": null, "parameter": null, "stability": "stable"}
  ],
  "regime": "weakly_nonlinear",
  "rho_star": 3.0,
  "status": "classified",
  "warnings": []
})j"});

        t.push_back({"wn-refined-family", pitch_wn(1.0 / 12.0),
                     th({{3.0, R(2, 3)}, {2.0, R(8, 9)}}), R"j({
  "A": 2.0,
  "bifurcation": {"near_tolerance": false, "type": "pitchfork",
    "witnesses": {"a1": 0.0, "a0'": 0.0, "a2": 0.0, "a1'": -1.0, "a3": 1.0}},
  "branches": [
    {"alpha": "8/9", "coefficient": "unspecified-by-paper", "family": "Phi3", "h": null,
     "parameter": {"name": "rho2", "value": 2.0}, "stability": null},
    {"alpha": "5/6", "coefficient": "unspecified-by-paper", "family": "OU_stable", "h": null, "parameter": null, "stability": "stable"}
  ],
  "regime": "weakly_nonlinear",
  "rho_star": 3.0,
  "status": "classified",
  "warnings": []
})j"});

        t.push_back({"wn-refined-steep", pitch_wn(1.0 / 12.0),
                     th({{3.0, R(2, 3)}, {1.0, R(1)}}), R"j({
  "A": 2.0,
  "bifurcation": {"near_tolerance": false, "type": "pitchfork",
    "witnesses": {"a1": 0.0, "a0'": 0.0, "a2": 0.0, "a1'": -1.0, "a3": 1.0}},
  "branches": [
    {"alpha": "8/9", "coefficient": "unspecified-by-paper", "family": "Phi3", "h": null, "parameter": null, "stability": null},
    {"alpha": "5/6", "coefficient": "unspecified-by-paper", "family": "OU_stable", "h": null, "parameter": null, "stability": "stable"}
  ],
  "regime": "weakly_nonlinear",
  "rho_star": 3.0,
  "status": "classified",
  "warnings": []
})j"});

        t.push_back({"wn-stable-point", stable_wn(), th({{1.0, R(2)}}), R"j({
  "A": 0.0,
  "bifurcation": {"near_tolerance": false, "type": "stable_point", "witnesses": {"a1": 1.0}},
  "branches": [
    {"alpha": "1/2", "coefficient": 1.0, "family": "OU_stable", "h": {"coef": 0.0, "power": "0"}, "parameter": null, "stability": "stable"}
  ],
  "regime": "weakly_nonlinear",
  "status": "classified",
  "warnings": []
})j"});

        t.push_back({"wn-saddle-clean", saddle_wn(), th({{1.0, R(2)}}), R"j({
  "A": 0.0,
  "bifurcation": {"near_tolerance": false, "type": "saddle_node",
    "witnesses": {"a1": 0.0, "a0'": 1.0, "a2": 1.0}},
  "branches": [
    {"alpha": "2/3", "coefficient": 1.0, "family": "Phi3", "h": {"coef": 0.0, "power": "0"}, "parameter": null, "stability": null}
  ],
  "regime": "weakly_nonlinear",
  "status": "classified",
  "warnings": []
})j"});

        t.push_back({"wn-saddle-family", saddle_wn(), th({{5.0, R(3, 2)}}), R"j({
  "A": 0.0,
  "bifurcation": {"near_tolerance": false, "type": "saddle_node",
    "witnesses": {"a1": 0.0, "a0'": 1.0, "a2": 1.0}},
  "branches": [
    {"alpha": "2/3", "coefficient": 1.0, "family": "Phi3", "h": {"coef": 0.0, "power": "0"},
     "parameter": {"name": "rho", "value": 5.0}, "stability": null}
  ],
  "regime": "weakly_nonlinear",
  "status": "classified",
  "warnings": []
})j"});

        t.push_back({"wn-reflected-critical", pitch_wn(-1.0 / 12.0), th({{3.0, R(2, 3)}}), R"j({
  "A": -2.0,
  "bifurcation": {"near_tolerance": false, "type": "pitchfork",
    "witnesses": {"a1": 0.0, "a0'": 0.0, "a2": 0.0, "a1'": -1.0, "a3": 1.0}},
  "branches": [
    {"alpha": "8/9", "coefficient": -3.0, "family": "Phi3", "h": {"coef": 1.0, "power": "1/3"}, "parameter": null, "stability": null},
    {"alpha": "5/6", "coefficient": 9.0, "family": "OU_stable", "h": {"coef": -2.0, "power": "1/3"}, "parameter": null, "stability": "stable"}
  ],
  "regime": "weakly_nonlinear",
  "rho_star": 3.0,
  "status": "classified",
  "warnings": ["negative asymmetry invariant: classified after the sign flip of the field; shifts and quadratic couplings are reported negated, drifts are unchanged"]
})j"});

        t.push_back({"wn-negative-shallow", pitch_wn(1.0 / 12.0), th({{-1.0, R(1, 2)}}), R"j({
  "A": 2.0,
  "bifurcation": {"near_tolerance": false, "type": "pitchfork",
    "witnesses": {"a1": 0.0, "a0'": 0.0, "a2": 0.0, "a1'": -1.0, "a3": 1.0}},
  "branches": [
    {"alpha": null, "coefficient": "unspecified-by-paper", "family": "OU_stable", "h": null, "parameter": null, "stability": "stable"}
  ],
  "regime": "weakly_nonlinear",
  "rho_star": 3.0,
  "status": "classified",
  "warnings": ["negative leading coefficient: a single stable limit whose scale varies continuously between 1/2 and 5/6; no closed forms are charted"]
})j"});

        {
            coex::PotentialSpec near = pitch_wn(1.0 / 12.0);
            near.coeffs[1].value = 3e-12;
            t.push_back({"wn-near-tolerance", near, th({{1.0, R(1)}}), R"j({
  "A": 0.0,
  "bifurcation": {"near_tolerance": true, "type": "stable_point", "witnesses": {"a1": 3e-12}},
  "branches": [],
  "regime": "weakly_nonlinear",
  "status": "near_tolerance",
  "warnings": ["bifurcation witness within a decade of the zero tolerance; refusing to classify"]
})j"});
        }

        t.push_back({"nz-balanced-quartic", noise_spec(1.0, -1.0),
                     th({{3.0, R(1)}, {5.0, R(2)}}), R"j({
  "B": 0.0,
  "bifurcation": {"near_tolerance": false, "type": "pitchfork",
    "witnesses": {"a0": 0.0, "a1": 0.0, "a0'": 0.0, "a2": 0.0, "a1'": -1.0, "a3": 1.0}},
  "branches": [
    {"alpha": "1", "coefficient": 1.0, "family": "Phi4", "h": {"coef": -1.0, "power": "1"},
     "parameter": {"name": "lambda", "value": 5.0}, "stability": null}
  ],
  "h_tuned": {"coef": -1.0, "power": "1"},
  "regime": "weak_noise",
  "status": "classified",
  "theta_tuned": [
    {"coef": 3.0, "log": false, "power": "1"},
    {"coef": -18.0, "log": true, "power": "2"},
    {"coef": 5.0, "log": false, "parameter": "lambda", "power": "2"}
  ],
  "warnings": ["the quartic limit carries an additional constant in the equation"]
})j"});

        const std::string noise_bif = R"j("bifurcation": {"near_tolerance": false, "type": "pitchfork",
    "witnesses": {"a0": 0.0, "a1": 0.0, "a0'": 0.0, "a2": 0.0, "a1'": -1.0, "a3": 1.0}})j";
        const std::string noise_star =
            R"j("theta_star": {"rho1_star": 3.0, "rho2_star": 3.9311120913133449, "rho3_star": 6.8682854553199912})j";
        const std::string pair_note =
            R"j("the two stable branches arise from opposite shifts and share the same limiting coefficients")j";
        auto nz = [&](const char* branches, const char* warnings) {
            return "{\n  \"B\": 1.0,\n  " + noise_bif + ",\n  \"branches\": [" + branches +
                   "],\n  \"regime\": \"weak_noise\",\n  \"status\": \"classified\",\n  " +
                   noise_star + ",\n  \"warnings\": [" + warnings + "]\n}";
        };
        auto ou_branch = [](const char* alpha, const char* family, const char* stability) {
            return std::string("{\"alpha\": ") + alpha +
                   ", \"coefficient\": \"unspecified-by-paper\", \"family\": \"" + family +
                   "\", \"h\": null, \"parameter\": null, \"stability\": " + stability + "}";
        };
        auto ou_s = [&](const char* alpha) { return ou_branch(alpha, "OU_stable", "\"stable\""); };
        auto ou_u = [&](const char* alpha) {
            return ou_branch(alpha, "OU_unstable", "\"unstable\"");
        };
        auto pair_at = [&](const char* alpha) {
            return ou_s(alpha) + ", " + ou_u(alpha) + ", " + ou_s(alpha);
        };

        t.push_back({"nz-l1-shallow-pair", noise_spec(1.0, 0.0), th({{1.0, R(1, 2)}}),
                     nz(pair_at("\"1/4\"").c_str(), pair_note.c_str())});
        t.push_back({"nz-l1-steep-single", noise_spec(1.0, 0.0), th({{1.0, R(3, 2)}}),
                     nz(ou_s("\"1/2\"").c_str(), "")});
        t.push_back({"nz-l1-super-pair", noise_spec(1.0, 0.0), th({{4.0, R(1)}}),
                     nz(pair_at("\"1/2\"").c_str(), pair_note.c_str())});
        t.push_back({"nz-l1-sub-single", noise_spec(1.0, 0.0), th({{2.0, R(1)}}),
                     nz(ou_s("\"1/2\"").c_str(), "")});
        t.push_back({"nz-l1-exhausted", noise_spec(1.0, 0.0), th({}),
                     nz(ou_s("\"1/2\"").c_str(), "")});

        t.push_back({"nz-l2-shallow-pair", noise_spec(1.0, 0.0),
                     th({{3.0, R(1)}, {1.0, R(7, 6)}}),
                     nz(pair_at("\"7/12\"").c_str(), pair_note.c_str())});
        t.push_back({"nz-l2-steep-single", noise_spec(1.0, 0.0),
                     th({{3.0, R(1)}, {1.0, R(3, 2)}}), nz(ou_s("\"2/3\"").c_str(), "")});
        t.push_back({"nz-l2-super-three", noise_spec(1.0, 0.0),
                     th({{3.0, R(1)}, {4.0, R(4, 3)}}),
                     nz((ou_s("\"2/3\"") + ", " + ou_u("\"2/3\"") + ", " + ou_s("\"2/3\"")).c_str(),
                        "")});
        t.push_back({"nz-l2-sub-single", noise_spec(1.0, 0.0),
                     th({{3.0, R(1)}, {3.0, R(4, 3)}}), nz(ou_s("\"2/3\"").c_str(), "")});
        t.push_back({"nz-l2-exhausted", noise_spec(1.0, 0.0), th({{3.0, R(1)}}),
                     nz(ou_s("\"2/3\"").c_str(), "")});

        t.push_back({"nz-l3-shallow", noise_spec(1.0, 0.0),
                     th({{3.0, R(1)}, {rho2s, R(4, 3)}, {1.0, R(8, 5)}}),
                     nz((ou_s("\"11/15\"") + ", " + ou_u("\"11/15\"") + ", " + ou_s("\"2/3\""))
                            .c_str(),
                        "")});
        t.push_back({"nz-l3-steep", noise_spec(1.0, 0.0),
                     th({{3.0, R(1)}, {rho2s, R(4, 3)}, {1.0, R(7, 4)}}),
                     nz(ou_s("\"2/3\"").c_str(), "")});
        t.push_back({"nz-l3-super", noise_spec(1.0, 0.0),
                     th({{3.0, R(1)}, {rho2s, R(4, 3)}, {8.0, R(5, 3)}}),
                     nz((ou_s("\"3/4\"") + ", " + ou_u("\"3/4\"") + ", " + ou_s("\"2/3\"")).c_str(),
                        "")});
        t.push_back({"nz-l3-sub", noise_spec(1.0, 0.0),
                     th({{3.0, R(1)}, {rho2s, R(4, 3)}, {6.0, R(5, 3)}}),
                     nz(ou_s("\"2/3\"").c_str(), "")});
        t.push_back({"nz-l3-exhausted", noise_spec(1.0, 0.0),
                     th({{3.0, R(1)}, {rho2s, R(4, 3)}}), nz(ou_s("\"2/3\"").c_str(), "")});

        const std::string phi3_prop =
            R"j({"alpha": "7/9", "coefficient": {"proportional_to": "B^(1/3)", "scale": 1.0, "value": null}, "family": "Phi3", "h": null, "parameter": null, "stability": null})j";
        const std::string phi3_family =
            R"j({"alpha": "7/9", "coefficient": {"proportional_to": "B^(1/3)", "scale": 1.0, "value": null}, "family": "Phi3", "h": null, "parameter": {"name": "rho4", "value": 2.0}, "stability": null})j";

        t.push_back({"nz-l4-shallow", noise_spec(1.0, 0.0),
                     th({{3.0, R(1)}, {rho2s, R(4, 3)}, {rho3s, R(5, 3)}, {1.0, R(7, 4)}}),
                     nz((ou_s("\"37/48\"") + ", " + ou_u("\"37/48\"") + ", " + ou_s("\"2/3\""))
                            .c_str(),
                        "")});
        t.push_back({"nz-l4-family", noise_spec(1.0, 0.0),
                     th({{3.0, R(1)}, {rho2s, R(4, 3)}, {rho3s, R(5, 3)}, {2.0, R(16, 9)}}),
                     nz((phi3_family + ", " + ou_s("\"2/3\"")).c_str(), "")});
        t.push_back({"nz-l4-steep-canonical", noise_spec(1.0, 0.0),
                     th({{3.0, R(1)}, {rho2s, R(4, 3)}, {rho3s, R(5, 3)}, {1.0, R(2)}}),
                     nz((phi3_prop + ", " + ou_s("\"2/3\"")).c_str(), "")});
        t.push_back({"nz-l4-exhausted", noise_spec(1.0, 0.0),
                     th({{3.0, R(1)}, {rho2s, R(4, 3)}, {rho3s, R(5, 3)}}),
                     nz((phi3_prop + ", " + ou_s("\"2/3\"")).c_str(), "")});

        t.push_back({"nz-negative-rho", noise_spec(1.0, 0.0),
                     th({{3.0, R(1)}, {-1.0, R(4, 3)}}),
                     nz((ou_branch("null", "OU_stable", "\"stable\"")).c_str(),
                        R"j("negative coefficient pushes the tuning below the critical expansion: a single stable limit whose scale varies continuously between 1/2 and 2/3")j")});

        t.push_back({"nz-reflected-family", noise_spec(-1.0, 0.0),
                     th({{3.0, R(1)}, {rho2s, R(4, 3)}, {rho3s, R(5, 3)}, {2.0, R(16, 9)}}), R"j({
  "B": -1.0,
  "bifurcation": {"near_tolerance": false, "type": "pitchfork",
    "witnesses": {"a0": 0.0, "a1": 0.0, "a0'": 0.0, "a2": 0.0, "a1'": -1.0, "a3": 1.0}},
  "branches": [
    {"alpha": "7/9", "coefficient": {"proportional_to": "B^(1/3)", "scale": -1.0, "value": null},
     "family": "Phi3", "h": null, "parameter": {"name": "rho4", "value": 2.0}, "stability": null},
    {"alpha": "2/3", "coefficient": "unspecified-by-paper", "family": "OU_stable", "h": null, "parameter": null, "stability": "stable"}
  ],
  "regime": "weak_noise",
  "status": "classified",
  "theta_star": {"rho1_star": 3.0, "rho2_star": 3.9311120913133449, "rho3_star": 6.8682854553199912},
  "warnings": ["negative asymmetry invariant: classified after the sign flip of the field; the quadratic coupling scale carries the sign"]
})j"});

        {
            coex::PotentialSpec off = noise_spec(1.0, 0.0);
            off.coeffs[1].value = 0.5;
            t.push_back({"nz-non-pitchfork", off, th({{1.0, R(1)}}), R"j({
  "B": 0.0,
  "bifurcation": {"near_tolerance": false, "type": "stable_point",
    "witnesses": {"a0": 0.0, "a1": 0.5}},
  "branches": [],
  "regime": "weak_noise",
  "status": "uncharted",
  "warnings": ["weak-noise classification applies at a pitchfork only"]
})j"});
        }

        return t;
    }();
    return table;
}

}  // namespace coex_test
