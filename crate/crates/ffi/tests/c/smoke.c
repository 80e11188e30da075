#include <math.h>
#include <stdio.h>
#include <string.h>

#include "erpsift.h"

#define CHECK(cond)                                                  \
    do {                                                             \
        if (!(cond)) {                                               \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                                \
        }                                                            \
    } while (0)

static unsigned long long state = 88172645463325252ULL;

static double uniform(void) {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return (double)(state >> 11) / 9007199254740992.0 - 0.5;
}

int main(void) {
    CHECK(strlen(erpsift_version()) > 0);

    double x[448], lp[448], hp[448];
    for (int i = 0; i < 448; i++) x[i] = sin(i * 0.05) + uniform();
    CHECK(erpsift_wavelet_split(x, 448, 5, ERPSIFT_BOUNDARY_PERIODIC, lp, hp) == ERPSIFT_STATUS_OK);
    for (int i = 0; i < 448; i++) CHECK(fabs(lp[i] + hp[i] - x[i]) < 1e-12);

    CHECK(erpsift_wavelet_split(NULL, 448, 5, 0, lp, hp) == ERPSIFT_STATUS_NULL_POINTER);
    char msg[64];
    size_t n = erpsift_last_error_message(msg, sizeof msg);
    CHECK(n > 0 && strstr(msg, "signal") != NULL);
    CHECK(erpsift_wavelet_split(x, 448, 5, 7, lp, hp) == ERPSIFT_STATUS_INVALID_ARGUMENT);

    ErpsiftRegistry *reg = erpsift_registry_default();
    size_t per = erpsift_registry_len(reg);
    CHECK(per == 27);
    double erp[2 * 448], feats[2 * 27];
    for (int i = 0; i < 2 * 448; i++) erp[i] = 5.0 * sin(i * 0.03) + uniform();
    CHECK(erpsift_extract_features(reg, erp, 2, 256.0, 64, 384, 5, 0, feats, 2 * per) == ERPSIFT_STATUS_OK);
    CHECK(erpsift_extract_features(reg, erp, 2, 256.0, 64, 384, 5, 0, feats, per) == ERPSIFT_STATUS_SHAPE);
    erpsift_registry_free(reg);

    enum { ROWS = 24, COLS = 6 };
    double m[ROWS * COLS];
    uint8_t y[ROWS];
    for (int r = 0; r < ROWS; r++) {
        y[r] = r % 2;
        for (int c = 0; c < COLS; c++) m[r * COLS + c] = uniform() + (c == 2 ? 4.0 * y[r] : 0.0);
    }
    ErpsiftDataset *ds = NULL;
    CHECK(erpsift_dataset_new(m, ROWS, COLS, y, &ds) == ERPSIFT_STATUS_OK);

    double w[COLS];
    CHECK(erpsift_relieff(ds, 5, w, COLS) == ERPSIFT_STATUS_OK);
    for (int c = 0; c < COLS; c++) CHECK(c == 2 || w[c] < w[2]);

    ErpsiftCvSettings s = erpsift_cv_settings_default();
    s.top_k = 2;
    s.neighbors = 5;
    s.repeats = 3;
    s.seed = 5;
    ErpsiftConfusion conf;
    CHECK(erpsift_cross_validate(ds, &s, &conf) == ERPSIFT_STATUS_OK);
    CHECK(conf.n_repeats == 3);
    CHECK(conf.mean[0][0] >= 90.0 && conf.mean[1][1] >= 90.0);
    CHECK(fabs(conf.mean[0][0] + conf.mean[0][1] - 100.0) < 1e-9);

    ErpsiftModel *model = NULL;
    CHECK(erpsift_model_train(ds, 1, 5, ERPSIFT_KERNEL_LINEAR, 0.0, 1.0, 0, &model) == ERPSIFT_STATUS_OK);
    CHECK(erpsift_model_n_selected(model) == 1);
    size_t sel;
    CHECK(erpsift_model_selected(model, &sel, 1) == ERPSIFT_STATUS_OK && sel == 2);
    double row[COLS] = {0, 0, 4.0, 0, 0, NAN};
    uint32_t label = 9;
    double decision = 0;
    CHECK(erpsift_model_predict(model, row, COLS, &label, &decision) == ERPSIFT_STATUS_OK);
    CHECK(label == 1 && decision > 0);
    CHECK(erpsift_model_predict(model, row, COLS - 1, &label, NULL) == ERPSIFT_STATUS_SHAPE);
    erpsift_model_free(model);
    erpsift_dataset_free(ds);
    erpsift_model_free(NULL);

    printf("c smoke ok\n");
    return 0;
}
