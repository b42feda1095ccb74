/* Minimal consumer of the C interface.  Build from the repository root:
 *
 *   cargo build -p subwalk-capi
 *   cc -Icrates/subwalk-capi/include crates/subwalk-capi/examples/smoke.c \
 *      target/debug/libsubwalk_capi.a -lm -lpthread -ldl -o smoke
 *   ./smoke
 */
#include <stdio.h>
#include <assert.h>
#include <math.h>
#include "subwalk.h"

int main(void) {
    SubwalkPhi *phi = NULL;
    assert(subwalk_phi_new("stable:0.5", &phi) == SubwalkOk);
    double v = 0.0;
    assert(subwalk_phi_eval(phi, 0.25, &v) == SubwalkOk);
    assert(fabs(v - 0.5) < 1e-12);

    SubwalkPhi *bad = NULL;
    assert(subwalk_phi_new("stable:1.5", &bad) == SubwalkErrUsage);
    printf("expected failure message: %s\n", subwalk_last_error_message());

    SubwalkWeights *w = NULL;
    assert(subwalk_weights_new(phi, 1e-3, &w) == SubwalkOk);
    double a1 = 0.0;
    assert(subwalk_weights_get(w, 1, &a1) == SubwalkOk);
    printf("a_1 = %.12f (tail %.3e, %zu stored)\n", a1, subwalk_weights_tail(w), subwalk_weights_len(w));

    SubwalkKernel *k = NULL;
    assert(subwalk_kernel_spectral(phi, 1, 4, 16, 64, &k) == SubwalkOk);
    int64_t x = 3;
    assert(subwalk_kernel_value(k, &x, 1, &v) == SubwalkOk);
    printf("p(4, 3) = %.9e, defect %.3e, steps %llu\n", v,
           subwalk_kernel_mass_defect(k), (unsigned long long)subwalk_kernel_steps(k));

    subwalk_kernel_free(k);
    subwalk_weights_free(w);
    subwalk_phi_free(phi);
    puts("C ABI smoke test passed");
    return 0;
}
