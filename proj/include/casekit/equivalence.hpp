#pragma once

#include <cstdint>
#include <string>

#include "casekit/dsl.hpp"

namespace casekit {

// Canonical form of a program: non-final steps in a deterministic
// topological order (the final step is the program's result and stays last),
// step references renumbered, commutative operands sorted, and every numeric
// surface form (literal, const_* token, percent literal) replaced by the
// canonical rendering of its value. The encoding is the serialization of that
// canonical program, so it re-parses and canonicalizes to itself.
struct CanonicalForm {
  Program program;
  std::string encoding;
};

CanonicalForm canonicalize(const Program& p);

// True iff the canonical encodings coincide. Invariant under add/multiply
// operand swaps, reordering of independent steps, and equivalent constant
// surface forms (const_100 vs 100, 5% vs 0.05). No algebraic rewriting.
bool programs_equivalent(const Program& a, const Program& b);

struct RandomEvalOptions {
  int trials = 100;
  std::uint64_t seed = 0;
  int max_resamples = 32;  // per trial, on execution errors
  double rel_tol = 1e-9;
};

// One-sided randomized oracle: substitutes shared random values for
// corresponding numeric literals (keyed by value, so const_100 and 100 share
// a slot) and random cells for referenced table rows, executes both programs
// and compares. Returns true iff every trial agrees within rel_tol; a false
// result disproves equivalence, a true result does not prove it. Trials that
// hit execution errors are resampled up to max_resamples times; exhausting
// the bound raises Error(EvalRetriesExhausted).
bool random_eval_equivalent(const Program& a, const Program& b,
                            const RandomEvalOptions& opt = {});

}  // namespace casekit
