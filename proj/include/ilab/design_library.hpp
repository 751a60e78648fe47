#pragma once

// Canonical designs and signal laws used by the built-in examples.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ilab/finite_dist.hpp"
#include "ilab/sampling_model.hpp"

namespace ilab {

/// Uniform over all injective r : {1..n} -> U.
Design srs_wor(std::size_t n, std::size_t population_size);
/// Uniform over all N^n mappings.
Design srs_wr(std::size_t n, std::size_t population_size);
/// Independent inclusion with probability p_k; the realized subset is listed
/// in increasing label order.
Design poisson(const std::vector<Rational>& p);
Design census(std::size_t population_size);
Design fixed_design(SelectionMapping r);

/// Uniform over injective mappings whose image holds exactly alloc[h] units of
/// stratum h, in any draw order.
Design stratified_at(const std::vector<std::int64_t>& strata, const std::map<std::int64_t, std::size_t>& alloc);
/// Kernel reading the stratum assignment from z = (h_1, ..., h_N).
DesignKernel stratified(std::map<std::int64_t, std::size_t> alloc);

/// Point mass on the unit holding the largest value, lowest label on ties.
/// z must be the signal itself.
Design select_max_at(const Signal& y);
DesignKernel select_max();

/// One kernel per row of weights: K_row(z) = sum_i weights[row][i] comps[i](z).
std::vector<DesignKernel> mixture_design(const std::vector<std::vector<Rational>>& weights,
                                         const std::vector<DesignKernel>& components);

/// Kernel from an explicit table z -> design.
DesignKernel table_kernel(std::string name, std::map<Value, Design> table);

/// N iid draws from a marginal over the alphabet.
FiniteDist<Signal> iid_signal(const FiniteDist<std::int64_t>& marginal, std::size_t population_size);

enum class DesignVariable { None, Signal, Fixed };

/// Attaches z: the empty tuple, the signal itself, or a fixed value.
FiniteDist<SignalZ> with_design_variable(const FiniteDist<Signal>& signal, DesignVariable kind,
                                         const Value& fixed = Value());

}  // namespace ilab
