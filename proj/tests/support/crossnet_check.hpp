#pragma once

#include <random>
#include <span>
#include <vector>

#include "xnetrec/crossnet.hpp"

namespace xnetrec::testing {

// Random user with `intervals` sparse, non-empty snapshots per network over `topics`.
inline UserRecord random_user(std::mt19937_64& rng, UserId id, UserKind kind, int topics, int intervals) {
  std::uniform_real_distribution<double> freq(0.2, 2.0);
  const auto stream = [&] {
    std::vector<std::vector<double>> s(static_cast<std::size_t>(intervals), std::vector<double>(topics, 0.0));
    for (auto& snap : s) {
      const int active = 1 + static_cast<int>(rng() % 3);
      for (int a = 0; a < active; ++a) snap[rng() % topics] += freq(rng);
    }
    return s;
  };
  UserRecord u;
  u.id = id;
  u.kind = kind;
  u.source_stream = stream();
  if (kind == UserKind::Existing) u.target_stream = stream();
  return u;
}

// Flattened parameter values and gradients of `model`, in slot order.
struct Flat {
  std::vector<double> values;
  std::vector<double> grads;
};

inline Flat flatten(CrossNetModel& model, CrossNetGrads& grads) {
  Flat f;
  for (const auto& s : model.slots(grads)) {
    f.values.insert(f.values.end(), s.value.begin(), s.value.end());
    f.grads.insert(f.grads.end(), s.grad.begin(), s.grad.end());
  }
  return f;
}

inline void assign(CrossNetModel& model, CrossNetGrads& grads, std::span<const double> flat) {
  std::size_t k = 0;
  for (const auto& s : model.slots(grads)) {
    for (double& x : s.value) x = flat[k++];
  }
}

// Back-propagated against central-difference gradients of the eval-mode total
// loss, per coordinate, over the given flat parameter indices.
inline std::vector<CoordinateCheck> crossnet_grad_check(CrossNetModel model, const UserRecord& user,
                                                        const CrossNetInstance& inst,
                                                        std::span<const std::size_t> indices, double h = 1e-5) {
  auto grads = model.make_grads();
  grads.zero();
  model.loss(user, inst, Mode::eval(), &grads);
  const auto flat = flatten(model, grads);
  auto probe = model;
  auto probe_grads = probe.make_grads();
  const auto total = [&](std::span<const double> x) {
    assign(probe, probe_grads, x);
    const auto l = probe.loss(user, inst, Mode::eval());
    return l.listwise + l.attention;
  };
  return grad_check_coordinates(total, flat.values, flat.grads, h, indices);
}

}  // namespace xnetrec::testing
