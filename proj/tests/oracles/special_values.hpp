// Generated by gen_special_values.py (mpmath, 50 significant digits). Do not edit.
#pragma once

#include <array>

namespace conc::oracle {

struct Point1 { double x; double value; };
struct Point2 { double a; double x; double value; };

inline constexpr std::array<Point1, 20> h_table{{
    {-0.999, 9.92092244721017862947946e-1},
    {-0.9, 6.697414907005954315982009e-1},
    {-0.5, 1.534264097200273452913839e-1},
    {-0.1, 5.175535907956328895249117e-3},
    {-1e-3, 5.001667500500333571607282e-7},
    {-1e-6, 5.0000016666675000005e-13},
    {1e-8, 4.999999983333333416666666e-17},
    {1e-5, 4.99998333341666616667e-11},
    {1e-3, 4.998334166166999762083195e-7},
    {0.01, 4.983416169976367669751112e-5},
    {0.1, 4.841197784757346048347336e-3},
    {0.5, 1.081976621622465729670197e-1},
    {1, 3.862943611198906188344642e-1},
    {2, 1.295836866004329074185736},
    {3, 2.545177444479562475337857},
    {5, 5.750556815368330004874864},
    {10, 1.637684800078207598468138e+1},
    {50, 1.505231072689406143538838e+2},
    {100, 3.66127172200967204539304e+2},
    {1e4, 8.21136141101321369601174e+4},
}};

inline constexpr std::array<Point1, 20> h1_table{{
    {-0.49, 3.685786437626904951198311e-1},
    {-0.3, 6.754446796632413360022129e-2},
    {-0.1, 5.572809000084121436330533e-3},
    {-1e-4, 5.000500062508751312706284e-9},
    {1e-8, 4.999999950000000624999991e-17},
    {1e-6, 4.999995000006249991250013e-13},
    {1e-4, 4.999500062491251312293784e-9},
    {1e-3, 4.99500624126310440845986e-7},
    {0.01, 4.950616379220466366140829e-5},
    {0.1, 4.554884989667773086060434e-3},
    {0.3, 3.508893593264826720044258e-2},
    {0.7, 1.508066615170332459282938e-1},
    {1, 2.679491924311227064725537e-1},
    {2.5, 1.050510257216821901802716},
    {7, 4.127016653792583114820735},
    {10, 6.417424305044159993411953},
    {42, 3.378045554270711268999773e+1},
    {100, 8.682255312124217479704438e+1},
    {1e3, 9.562674615073099165840257e+2},
    {1e6, 9.985867860840735585520873e+5},
}};

inline constexpr std::array<Point2, 20> phi_a_table{{
    {0.5, -3, 2.892520640593719315733122},
    {1, -1, 3.678794411714423215955238e-1},
    {1, 1e-9, 5.000000001666666667083333e-19},
    {1, 1e-5, 5.000016666708333416666806e-11},
    {1, 0.01, 5.01670841680575421654569e-5},
    {1, 0.5, 1.487212707001281468486508e-1},
    {1, 2, 4.389056098930650227230427},
    {2, 1.5, 4.021384230796916935232132},
    {0.1, 3, 4.985880757600310398374431},
    {0.01, -7, 2.393819905948228857972632e+1},
    {1e-3, 2, 2.001334000266755580958732},
    {1e-6, 3, 4.500004500003375002025001},
    {1e-7, -4, 7.999998933333439999991467},
    {3, -2, 5.558309724640740398247828e-1},
    {0.25, 10, 1.389199033712555750091228e+2},
    {5, 0.3, 7.926756281352259290408222e-2},
    {1, -20, 1.900000000206115362243856e+1},
    {0.2, -0.2, 1.973597880808023598026728e-2},
    {1e-4, 1e-3, 5.000000166666670833333417e-7},
    {2, 5, 5.503866448701679129239475e+3},
}};

}  // namespace conc::oracle
