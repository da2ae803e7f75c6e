#include "pqbc.h"
#include <stdio.h>

int main(void) {
    PqbcCipher *c = NULL;
    if (pqbc_cipher_new(8, 8, 7, &c) != PQBC_STATUS_OK) return 1;
    uint64_t y = 0, x = 0;
    for (uint64_t p = 0; p < 256; p++) {
        if (pqbc_lrw(c, 3, 5, 9, p, false, &y) != PQBC_STATUS_OK) return 2;
        if (pqbc_lrw(c, 3, 5, 9, y, true, &x) != PQBC_STATUS_OK || x != p) return 3;
    }
    if (pqbc_cipher_encrypt(c, 0, 256, &y) != PQBC_STATUS_WIDTH_MISMATCH) return 4;
    char msg[128];
    if (pqbc_last_error_message(msg, sizeof msg) == 0) return 5;
    pqbc_cipher_free(c);

    PqbcBoundQuery q = {12, 12, 4.0, 16.0, 0.0, 0.0, 0.0, 0, 0};
    PqbcBound b;
    if (pqbc_bound(PQBC_FORMULA_FX_PQ, &q, &b) != PQBC_STATUS_OK || b.term_count != 2) return 6;
    if (pqbc_bound(PQBC_FORMULA_MODE_CBC, &q, &b) != PQBC_STATUS_MISSING_PARAMETER) return 7;
    printf("%.6f\n", b.value);
    return 0;
}
