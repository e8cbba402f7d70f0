#include <stdio.h>
#include "tfkit.h"

int main(void) {
    const double mass[2] = {1.0, -1.0};
    TfkitMeasure *mu = NULL, *image = NULL;
    TfkitTransfunction *spread = NULL;
    double before = 0.0, after = -1.0;

    if (tfkit_measure_new(mass, 2, &mu) != TFKIT_STATUS_OK) return 1;
    if (tfkit_transfunction_uniform_spread(2, 4, &spread) != TFKIT_STATUS_OK) return 2;
    if (tfkit_extend_signed(spread, mu, &image) != TFKIT_STATUS_OK) return 3;
    tfkit_measure_norm(mu, &before);
    tfkit_measure_norm(image, &after);
    if (tfkit_extend_signed(spread, NULL, &image) != TFKIT_STATUS_NULL_POINTER) return 4;
    if (tfkit_last_error() == NULL) return 5;
    printf("%g %g\n", before, after);

    tfkit_measure_free(image);
    tfkit_measure_free(mu);
    tfkit_transfunction_free(spread);
    return 0;
}
