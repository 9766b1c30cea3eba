#pragma once

// Coefficient tables shared by the libm-backed normal functions and the
// vectorized kernels.

namespace dps::simd::coef {

// Wichura, AS 241 (PPND16). Numerators and denominators in Horner order,
// highest degree first.
inline constexpr double kCentralSplit = 0.425;
inline constexpr double kCentralShift = 0.180625;
inline constexpr double kCentralNum[8] = {
    2509.0809287301226727, 33430.575583588128105, 67265.770927008700853, 45921.953931549871457,
    13731.693765509461125, 1971.5909503065514427, 133.14166789178437745, 3.387132872796366608};
inline constexpr double kCentralDen[8] = {
    5226.495278852545925, 28729.085735721942674, 39307.89580009271061, 21213.794301586595867,
    5394.1960214247511077, 687.1870074920579083, 42.313330701600911252, 1.0};

inline constexpr double kTailSplit = 5.0;
inline constexpr double kNearShift = 1.6;
inline constexpr double kNearNum[8] = {
    7.7454501427834140764e-4, 0.0227238449892691845833, 0.24178072517745061177,
    1.27045825245236838258, 3.64784832476320460504, 5.7694972214606914055,
    4.6303378461565452959, 1.42343711074968357734};
inline constexpr double kNearDen[8] = {
    1.05075007164441684324e-9, 5.475938084995344946e-4, 0.0151986665636164571966,
    0.14810397642748007459, 0.68976733498510000455, 1.6763848301838038494,
    2.05319162663775882187, 1.0};

inline constexpr double kFarShift = 5.0;
inline constexpr double kFarNum[8] = {
    2.01033439929228813265e-7, 2.71155556874348757815e-5, 0.0012426609473880784386,
    0.026532189526576123093, 0.29656057182850489123, 1.7848265399172913358,
    5.4637849111641143699, 6.6579046435011037772};
inline constexpr double kFarDen[8] = {
    2.04426310338993978564e-15, 1.4215117583164458887e-7, 1.8463183175100546818e-5,
    7.868691311456132591e-4, 0.0148753612908506148525, 0.13692988092273580531,
    0.59983220655588793769, 1.0};

// Hart (1968) algorithm 5666 for the normal tail, as arranged by West,
// used below kCdfCut.
inline constexpr double kCdfCut = 4.0;
inline constexpr double kCdfLimit = 37.0;
inline constexpr double kCdfNum[7] = {
    3.52624965998911e-02, 0.700383064443688, 6.37396220353165, 33.912866078383,
    112.079291497871, 221.213596169931, 220.206867912376};
inline constexpr double kCdfDen[8] = {
    8.83883476483184e-02, 1.75566716318264, 16.064177579207, 86.7807322029461,
    296.564248779674, 637.333633378831, 793.826512519948, 440.413735824752};
inline constexpr double kSqrtTwoPi = 2.506628274631;
// Beyond kCdfCut: Mills-ratio continued fraction truncated after this many
// terms, seeded with West's tail constant. The rational branch loses
// relative accuracy in the tail, so the cut sits lower than West's 7.07;
// both sides stay within ~1.3e-13 relative.
inline constexpr int kCdfFractionTerms = 24;
inline constexpr double kCdfFractionSeed = 0.65;

} // namespace dps::simd::coef
