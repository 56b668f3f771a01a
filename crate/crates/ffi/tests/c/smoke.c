#include <math.h>
#include <stdio.h>

#include "cvbell.h"

static int fail(const char *what) {
    const char *msg = cvb_last_error_message();
    fprintf(stderr, "%s: %s\n", what, msg ? msg : "(no message)");
    return 1;
}

int main(void) {
    CvbState *ghz = NULL;
    if (cvb_state_from_json("{\"type\":\"ghz\",\"n\":3,\"structured\":true}", &ghz) != CVB_STATUS_OK)
        return fail("ghz");
    if (cvb_state_n_modes(ghz) != 3)
        return fail("n_modes");

    const int8_t s[3] = {1, 1, 1};
    CvbReport r;
    if (cvb_evaluate(ghz, NULL, NULL, s, 3, &r) != CVB_STATUS_OK)
        return fail("evaluate");
    if (fabs(r.lhs - 0.25) > 1e-12 || r.violated || !r.trivial_bipartition)
        return fail("ghz report");

    const int8_t short_s[2] = {1, -1};
    if (cvb_evaluate(ghz, NULL, NULL, short_s, 2, &r) != CVB_STATUS_INVALID_SETTINGS)
        return fail("length mismatch accepted");
    if (cvb_last_error_message() == NULL)
        return fail("missing message");
    cvb_state_free(ghz);

    CvbState *tmsv = NULL;
    if (cvb_state_from_json("{\"type\":\"tmsv\",\"r\":0.3,\"cutoff\":20,\"headroom\":2}", &tmsv) != CVB_STATUS_OK)
        return fail("tmsv");
    double eig = 0.0;
    if (cvb_partial_transpose_min_eig(tmsv, 1, &eig) != CVB_STATUS_OK || !(eig < 0.0))
        return fail("partial transpose");
    const double theta[2] = {0.3, 1.1};
    const double delta[2] = {0.2, -0.4};
    CvbVerification v;
    if (cvb_verify(tmsv, theta, delta, short_s, 2, true, &v) != CVB_STATUS_OK || !v.consistent || !v.has_pt_min_eig)
        return fail("verify");
    cvb_state_free(tmsv);

    if (cvb_state_from_json("{\"type\":\"nope\"}", &tmsv) != CVB_STATUS_PARSE || tmsv != NULL)
        return fail("bad document accepted");
    printf("ok\n");
    return 0;
}
