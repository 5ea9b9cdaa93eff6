// Reference values computed once with mpmath at 40 significant digits.
#pragma once

#include <array>

namespace fixtures {

struct SpecialRow {
  double x;
  double log_gamma;
  double digamma;
  double trigamma;
};

inline constexpr std::array<SpecialRow, 13> kSpecialValues{{
    {1e-6, 1.3815509980749431669e+1, -1.0000005772140199687e+6, 1.0000000000016449317e+12},
    {1e-4, 9.2102826586339622584, -1.0000577051183514335e+4, 1.0000000164469368793e+8},
    {0.001, 6.9071788853838536825, -1.0005755719318103005e+3, 1.000001642533195869e+6},
    {0.1, 2.2527126517342059599, -1.0423754940411076795e+1, 1.0143329915079275882e+2},
    {0.5, 5.7236494292470008707e-1, -1.9635100260214234794, 4.9348022005446793094},
    {1, 0.0, -5.7721566490153286061e-1, 1.6449340668482264365},
    {1.5, -1.2078223763524522235e-1, 3.6489973978576520559e-2, 9.3480220054467930942e-1},
    {2, 0.0, 4.2278433509846713939e-1, 6.4493406684822643647e-1},
    {3.7, 1.4280723266653879219, 1.1671535393615113859, 3.100378576700383191e-1},
    {10, 1.2801827480081469611e+1, 2.2517525890667211076, 1.0516633568168574612e-1},
    {100, 3.5913420536957539878e+2, 4.6001618527380874002, 1.0050166663333571395e-2},
    {12345.678, 1.0395991990554606092e+5, 9.4210208207417608869, 8.1003287231112068383e-5},
    {1e6, 1.281550456914761166e+7, 1.3815510057964190771e+1, 1.0000005000001666667e-6},
}};

struct GammaCdfRow {
  double shape;
  double rate;
  double x;
  double cdf;
};

inline constexpr std::array<GammaCdfRow, 8> kGammaCdfValues{{
    {1, 1, 1, 6.321205588285576784e-1},
    {0.5, 2, 0.3, 7.2667832170770185497e-1},
    {5, 1, 5, 5.5950671493478758856e-1},
    {5, 1, 2.5, 1.0882198108584875765e-1},
    {2, 4, 0.5, 5.9399415029016192432e-1},
    {30, 1, 25, 1.821039159774551098e-1},
    {0.2, 3, 0.01, 5.374555615901338563e-1},
    {100, 2, 55, 8.417213299399129062e-1},
}};

}  // namespace fixtures
