#include <stdio.h>
#include <string.h>
#include "fglab.h"

int main(void) {
    FglabLaw *law = NULL;
    if (fglab_law_new("multiplicative", 6, &law) != FGLAB_STATUS_OK) return 10;
    char *c = NULL;
    if (fglab_law_coeff(law, 1, 1, &c) != FGLAB_STATUS_OK) return 11;
    if (strcmp(c, "beta") != 0) return 12;
    fglab_string_free(c);
    fglab_law_free(law);

    if (fglab_law_new("bogus", 6, &law) != FGLAB_STATUS_USAGE) return 13;
    if (fglab_last_error() == NULL) return 14;

    FglabPresentation *p = NULL;
    if (fglab_presentation_new("RB", 6, true, &p) != FGLAB_STATUS_OK) return 15;
    int64_t r = 0;
    if (fglab_rho(p, 5, &r) != FGLAB_STATUS_OK || r != 5) return 16;
    if (fglab_rho(p, 1, &r) != FGLAB_STATUS_OK || r != FGLAB_RHO_INFINITE) return 17;
    fglab_presentation_free(p);

    const char *argv[] = {"level-verify", "--n", "2"};
    char *report = NULL;
    int32_t code = -1;
    if (fglab_run_command(argv, 3, &report, &code) != FGLAB_STATUS_OK || code != 0) return 18;
    fglab_string_free(report);
    printf("ok %s\n", fglab_version());
    return 0;
}
