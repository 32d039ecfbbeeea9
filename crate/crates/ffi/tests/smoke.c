#include <math.h>
#include <stdio.h>

#include "kicked_dirac.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__,   \
                    #cond, kd_last_error_message());                  \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    KdParams params = {0.01, 0.1, 2.0, 1.0, 1024, KD_MODEL_DIRAC_SPINOR};
    KdGaussian packet = {-50.0, 4.0, {0.70710678118654752440, 0.70710678118654752440}, {0.0, 0.0}};
    KdSimulation *sim = NULL;
    KdObservables obs;
    double t1, t2, density[1024], total = 0.0;
    size_t i;

    CHECK(kd_simulation_new(&params, &packet, &sim) == KD_STATUS_OK);
    CHECK(kd_crossing_time(-50.0, 2.0, 1.0, 0.01, &t1, &t2) == KD_STATUS_OK);
    CHECK(kd_simulation_step(sim, 100) == KD_STATUS_OK);
    CHECK(kd_simulation_observables(sim, &obs) == KD_STATUS_OK);
    CHECK(obs.t == 100);
    CHECK(fabs(obs.p_plus + obs.p_minus - 1.0) < 1e-12);
    CHECK(kd_simulation_momentum_density(sim, density, 1024) == KD_STATUS_OK);
    for (i = 0; i < 1024; ++i) total += density[i];
    CHECK(fabs(total - 1.0) < 1e-12);
    CHECK(kd_simulation_step_inverse(sim, 1000) == KD_STATUS_INVALID_ARGUMENT);
    CHECK(kd_last_error_message()[0] != '\0');
    kd_simulation_free(sim);

    printf("ok version %s t1 %.2f\n", kd_version(), t1);
    return 0;
}
