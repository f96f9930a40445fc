#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "oscgeo/atlas.hpp"

namespace oscgeo {

struct AxiomProbe {
    std::vector<VecD> points;
    int jmin = -4;
    int jmax = 0;
    int m = 4;               // jet order for smooth engulfing
    int ball_samples = 33;   // local grid per ball axis
    int doubling_cap = 8;    // accepted covering multiplicity
};

struct AxiomWitness {
    std::string axiom;
    int j = 0, jp = 0;
    VecD x, xp;
    double value = 0.0;
    std::string note;
};

struct AxiomReport {
    bool compatibility = false;   // x in B_j(x), chart(0) = x, inverse round trip
    bool engulfing = false;       // set-theoretic axiom (ii)
    bool weak_doubling = false;   // axiom (iii)
    bool nesting = false;         // axiom (iv), c < 1
    bool smooth_engulfing = false;  // axiom (v), finite jet norms
    bool measure = false;           // axiom (vi) weight normalized and positive

    double nesting_c = 0.0;
    std::map<int, double> engulfing_norms;  // |j - j'| -> sup jet norm of transitions
    int doubling_multiplicity = 0;
    std::vector<AxiomWitness> witnesses;

    bool all_pass() const {
        return compatibility && engulfing && weak_doubling && nesting && smooth_engulfing &&
               measure;
    }
    nlohmann::json json() const;
};

AxiomReport check_axioms(const ChartAtlas& atlas, const AxiomProbe& probe);

}  // namespace oscgeo
