#pragma once

#include <string_view>

namespace prewet {

enum class AiryMethod { series, asymptotic };

struct AiryEval {
    double value = 0;       // Ai(x)
    double derivative = 0;  // Ai'(x)
    AiryMethod method = AiryMethod::series;
};

std::string_view to_string(AiryMethod m);

/// Ai and Ai' to 1e-10 absolute on |x| <= 100: Maclaurin series (long
/// double) on [-8, 6], asymptotic expansions outside. Throws AccuracyRange
/// beyond |x| = 100.
AiryEval airy(double x);

/// Series and asymptotic branches on their own, for overlap checks.
AiryEval airy_series(double x);
AiryEval airy_asymptotic(double x);

/// Magnitude of the k-th zero of Ai on the negative axis, k in 1..20.
double airy_zero(int k);
/// Magnitude of the k-th zero of Ai', k in 1..20.
double airy_prime_zero(int k);

}  // namespace prewet
