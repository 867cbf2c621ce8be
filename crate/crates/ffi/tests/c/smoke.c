#include <stdio.h>
#include <math.h>
#include "fbpaug.h"

#define N 32

static int fail(const char *what, FbpaugStatus st) {
    fprintf(stderr, "%s: status %d: %s\n", what, (int)st, fbpaug_last_error_message());
    return 1;
}

int main(void) {
    double px[N * N];
    for (int r = 0; r < N; r++)
        for (int c = 0; c < N; c++) {
            double y = r - (N - 1) / 2.0, x = c - (N - 1) / 2.0;
            px[r * N + c] = (x * x + y * y <= 100.0) ? 1.0 : 0.0;
        }

    FbpaugImage *img = NULL, *soft = NULL, *sharp = NULL;
    FbpaugStatus st = fbpaug_image_new(N, N, 1.0, 1.0, px, &img);
    if (st != FBPAUG_STATUS_OK) return fail("image_new", st);

    st = fbpaug_fbpaug(img, -1.0, 0.7, 0, &soft);
    if (st != FBPAUG_STATUS_OK) return fail("fbpaug soft", st);
    st = fbpaug_fbpaug(img, 30.0, 3.0, 0, &sharp);
    if (st != FBPAUG_STATUS_OK) return fail("fbpaug sharp", st);

    double centre[N * N];
    st = fbpaug_image_copy_values(soft, centre, N * N);
    if (st != FBPAUG_STATUS_OK) return fail("copy_values", st);
    if (fabs(centre[(N / 2) * N + N / 2] - 1.0) > 0.1) {
        fprintf(stderr, "soft centre value %f\n", centre[(N / 2) * N + N / 2]);
        return 1;
    }

    FbpaugImage *bad = NULL;
    st = fbpaug_fbpaug(img, -3.0, 1.0, 0, &bad);
    if (st != FBPAUG_STATUS_INVALID_ARGUMENT || bad != NULL) return fail("expected invalid argument", st);

    fbpaug_image_free(sharp);
    fbpaug_image_free(soft);
    fbpaug_image_free(img);
    printf("ok %s\n", fbpaug_version());
    return 0;
}
