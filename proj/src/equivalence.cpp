#include "casekit/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "casekit/errors.hpp"
#include "casekit/executor.hpp"
#include "casekit/text.hpp"

namespace casekit {

namespace {

// Deep keys longer than this are replaced by a hash marker. Keeps the key
// computation linear on adversarial step chains that double on inlining.
constexpr std::size_t kKeyCap = 4096;

std::string cap_key(std::string&& s) {
  if (s.size() <= kKeyCap) return std::move(s);
  // two FNV passes over different framings give a 128-bit marker
  std::string rev(s.rbegin(), s.rend());
  return "\xC2\xA7" + text::fnv1a64_hex(s) + text::fnv1a64_hex(rev);
}

// Value of a numeric operand as the executor would see it.
double operand_value(const Operand& o) {
  return o.kind == Operand::Kind::Number && o.percent ? o.value / 100.0 : o.value;
}

std::string operand_sort_key(const Operand& o, const std::vector<std::string>& deep) {
  switch (o.kind) {
    case Operand::Kind::Number:
    case Operand::Kind::Constant:
      return "n:" + text::canonical_number(operand_value(o));
    case Operand::Kind::Text:
      return "t:" + o.raw;
    case Operand::Kind::StepRef:
      return "s:" + deep[o.step];
  }
  return {};
}

// Fully inlined semantic key of each step, memoized bottom-up.
std::vector<std::string> deep_keys(const Program& p) {
  std::vector<std::string> deep(p.steps.size());
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const Step& s = p.steps[i];
    std::string k0 = operand_sort_key(s.args[0], deep);
    std::string k1 = operand_sort_key(s.args[1], deep);
    if (op_is_commutative(s.op) && k1 < k0) std::swap(k0, k1);
    std::string key;
    key.reserve(k0.size() + k1.size() + 16);
    key += op_token(s.op);
    key += '(';
    key += k0;
    key += ',';
    key += k1;
    key += ')';
    deep[i] = cap_key(std::move(key));
  }
  return deep;
}

Operand canonical_operand(const Operand& o, const std::vector<std::size_t>& new_pos) {
  switch (o.kind) {
    case Operand::Kind::Number:
    case Operand::Kind::Constant: {
      double v = operand_value(o);
      return Operand::number(v, text::canonical_number(v));
    }
    case Operand::Kind::Text:
      return o;  // already lowercase
    case Operand::Kind::StepRef:
      return Operand::step_ref(new_pos[o.step]);
  }
  return o;
}

}  // namespace

CanonicalForm canonicalize(const Program& p) {
  const std::size_t n = p.steps.size();
  std::vector<std::string> deep = deep_keys(p);

  // Lexicographic topological order: among steps whose dependencies are
  // already emitted, pick the smallest (deep key, original index). The final
  // step is the program's result and always stays last, so programs with the
  // same step set but different roots do not unify.
  std::vector<bool> emitted(n, false);
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<std::size_t> new_pos(n, 0);

  auto ready = [&](std::size_t i) {
    for (const Operand& o : p.steps[i].args) {
      if (o.kind == Operand::Kind::StepRef && !emitted[o.step]) return false;
    }
    return true;
  };

  for (std::size_t round = 0; round + 1 < n; ++round) {
    std::size_t best = n;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (emitted[i] || !ready(i)) continue;
      if (best == n || deep[i] < deep[best] || (deep[i] == deep[best] && i < best)) {
        best = i;
      }
    }
    // a valid program always has a ready step (references point backwards)
    emitted[best] = true;
    new_pos[best] = order.size();
    order.push_back(best);
  }
  emitted[n - 1] = true;
  new_pos[n - 1] = order.size();
  order.push_back(n - 1);

  Program canon;
  canon.steps.reserve(n);
  for (std::size_t idx : order) {
    const Step& s = p.steps[idx];
    Step out;
    out.op = s.op;
    out.args[0] = canonical_operand(s.args[0], new_pos);
    out.args[1] = canonical_operand(s.args[1], new_pos);
    if (op_is_commutative(s.op)) {
      std::string k0 = operand_sort_key(s.args[0], deep);
      std::string k1 = operand_sort_key(s.args[1], deep);
      if (k1 < k0 || (k1 == k0 && out.args[1].token() < out.args[0].token())) {
        std::swap(out.args[0], out.args[1]);
      }
    }
    canon.steps.push_back(std::move(out));
  }

  CanonicalForm form;
  form.encoding = serialize_program(canon);
  form.program = std::move(canon);
  return form;
}

bool programs_equivalent(const Program& a, const Program& b) {
  return canonicalize(a).encoding == canonicalize(b).encoding;
}

// ---------------------------------------------------------------------------
// randomized evaluation oracle
// ---------------------------------------------------------------------------

namespace {

// Deterministic uniform double in [lo, hi) from a splitmix-style step;
// avoids the implementation-defined std::uniform_real_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9E3779B97F4A7C15ull) {}

  double uniform(double lo, double hi) {
    std::uint64_t z = next();
    double u = static_cast<double>(z >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

void collect_slots(const Program& p, std::set<std::string>& literal_keys,
                   std::set<std::string>& row_names) {
  for (const Step& s : p.steps) {
    if (op_kind(s.op) == OpKind::Table) {
      if (s.args[0].kind != Operand::Kind::StepRef) row_names.insert(s.args[0].raw);
      continue;
    }
    for (const Operand& o : s.args) {
      if (o.is_numeric()) literal_keys.insert(text::canonical_number(operand_value(o)));
    }
  }
}

Program substitute(const Program& p, const std::map<std::string, double>& subs) {
  Program out = p;
  for (Step& s : out.steps) {
    if (op_kind(s.op) == OpKind::Table) continue;
    for (Operand& o : s.args) {
      if (!o.is_numeric()) continue;
      double v = subs.at(text::canonical_number(operand_value(o)));
      o = Operand::number(v, text::canonical_number(v));
    }
  }
  return out;
}

}  // namespace

bool random_eval_equivalent(const Program& a, const Program& b,
                            const RandomEvalOptions& opt) {
  if (opt.trials < 1) {
    throw Error(errkind::kInvalidArgument, "trials must be >= 1");
  }

  std::set<std::string> literal_keys;
  std::set<std::string> row_names;
  collect_slots(a, literal_keys, row_names);
  collect_slots(b, literal_keys, row_names);

  Rng rng(opt.seed);

  for (int trial = 0; trial < opt.trials; ++trial) {
    bool done = false;
    for (int attempt = 0; attempt <= opt.max_resamples && !done; ++attempt) {
      // positive values away from zero keep divide and exp well-behaved
      std::map<std::string, double> subs;
      for (const std::string& key : literal_keys) {
        subs[key] = rng.uniform(0.5, 3.0);
      }

      TableData table;
      if (!row_names.empty()) {
        std::size_t width = 2 + static_cast<std::size_t>(rng.next() % 4);
        for (std::size_t c = 0; c < width; ++c) {
          table.column_headers.push_back("c" + std::to_string(c));
        }
        for (const std::string& name : row_names) {
          TableData::Row row;
          row.header = name;
          for (std::size_t c = 0; c < width; ++c) {
            row.cells.push_back(text::canonical_number(rng.uniform(0.5, 3.0)));
          }
          table.rows.push_back(std::move(row));
        }
      }
      const TableData* tbl = row_names.empty() ? nullptr : &table;

      ExecResult ra, rb;
      try {
        ra = execute(substitute(a, subs), tbl);
        rb = execute(substitute(b, subs), tbl);
      } catch (const ExecError&) {
        if (attempt == opt.max_resamples) {
          throw Error(errkind::kEvalRetriesExhausted,
                      "execution kept failing under random substitution");
        }
        continue;  // resample this trial
      }
      if (!std::isfinite(ra.is_numeric() ? ra.number : 0.0) ||
          !std::isfinite(rb.is_numeric() ? rb.number : 0.0)) {
        if (attempt == opt.max_resamples) {
          throw Error(errkind::kEvalRetriesExhausted,
                      "non-finite results under random substitution");
        }
        continue;
      }

      if (ra.kind != rb.kind) return false;
      if (ra.kind == ExecResult::Kind::Boolean) {
        if (ra.truth != rb.truth) return false;
      } else {
        double scale = std::max({1.0, std::abs(ra.number), std::abs(rb.number)});
        if (std::abs(ra.number - rb.number) > opt.rel_tol * scale) return false;
      }
      done = true;
    }
  }
  return true;
}

}  // namespace casekit
