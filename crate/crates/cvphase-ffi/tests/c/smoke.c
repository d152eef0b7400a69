#include <math.h>
#include <stdio.h>
#include "cvphase.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "line %d: %s\n", __LINE__, #cond); return 1; } } while (0)

int main(void) {
    double v = 0.0, settings[4], cov[16], r = 0.0, phi = 0.0;
    CHECK(cvp_discord_tmss(0.0, &v) == CVP_STATUS_OK && v == 0.0);
    CHECK(cvp_bell_letter_threshold(&v) == CVP_STATUS_OK && fabs(v - 0.989761) < 1e-4);

    CvpGaussianState *g = NULL;
    CHECK(cvp_gaussian_state_new(0.7, 0.2, &g) == CVP_STATUS_OK && g != NULL);
    CHECK(cvp_gaussian_state_params(g, &r, &phi) == CVP_STATUS_OK && r == 0.7 && phi == 0.2);
    CHECK(cvp_gaussian_state_covariance(g, cov) == CVP_STATUS_OK && fabs(cov[0] - cosh(1.4)) < 1e-12);
    CHECK(cvp_gaussian_state_wigner(g, 0, 0, 0, 0, &v) == CVP_STATUS_OK && fabs(v - 1.0 / (M_PI * M_PI)) < 1e-12);
    cvp_gaussian_state_free(g);

    CHECK(cvp_gaussian_state_new(-1.0, 0.0, &g) == CVP_STATUS_INVALID_ARGUMENT && g == NULL);
    CHECK(cvp_last_error_message()[0] != '\0');

    CvpSpinTriple *t = NULL;
    CHECK(cvp_spin_triple_new(CVP_SPIN_FAMILY_BW, 121, 0.0, &t) == CVP_STATUS_OK);
    CHECK(cvp_pseudospin_bell_max(t, 1.0, 0.0, &v, settings) == CVP_STATUS_OK);
    CHECK(v > 2.0 && v <= 2.0 * sqrt(2.0) + 1e-6);
    CHECK(cvp_pseudospin_bell_max(t, 3.0, 0.0, &v, NULL) == CVP_STATUS_TRUNCATION);
    cvp_spin_triple_free(t);
    printf("ok %s\n", cvp_version());
    return 0;
}
