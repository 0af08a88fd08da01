#pragma once

#include <string>

namespace dehnlab {

// Per-move charge constants and envelope constants for the composite fills.
// Every experiment report embeds the model it ran under.
struct CostModel {
    // per-move: cost = C_kind * (sum of barlog over the move's coefficient
    // parameters, padded with 1 up to two summands)^2; free moves cost 0
    double C_Add = 1.0;
    double C_Mul = 1.0;
    double C_Com = 1.0;
    double C_Swap = 1.0;
    double C_Diag = 1.0;
    double C_ShortEquiv = 1.0;

    // envelopes asserted by the conformance suites
    double C_NP = 24.0;    // triangular fill <= C_NP * n^3 h^2
    double C_Para = 640.0; // parabolic split <= C_Para * l^2
    double C_Rank2 = 2800.0; // rank-2 fill   <= C_Rank2 * l^2

    bool valid() const {
        return C_Add > 0 && C_Mul > 0 && C_Com > 0 && C_Swap > 0 && C_Diag > 0 &&
               C_ShortEquiv > 0 && C_NP > 0 && C_Para > 0 && C_Rank2 > 0;
    }

    std::string json() const;
    static CostModel from_json_text(const std::string& text);
};

} // namespace dehnlab
