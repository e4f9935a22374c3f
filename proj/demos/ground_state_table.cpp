#include <cstdio>

#include <nlslab/ground_state.hpp>

// Prints the ground-state constants at two quadrature resolutions so the
// Richardson agreement is visible by eye.
int main() {
  using namespace nlslab;
  std::printf("%2s %10s %22s %22s %22s %22s\n", "n", "panels", "grad_W_sq", "crit_norm_W",
              "sharp_sobolev", "Etilde_W");
  for (int n : {3, 4, 5})
    for (int res : {32, 64}) {
      GroundStateConstants gc = ground_state_constants(n, res);
      std::printf("%2d %10d %22.15e %22.15e %22.15e %22.15e\n", n, res, gc.grad_W_sq,
                  gc.crit_norm_W, gc.sharp_sobolev, gc.Etilde_W);
    }
  return 0;
}
