/* Generated by hlsr codegen: conv2d_stream K=3 640x480 */
#include "conv2d_stream.h"
#ifdef HLS_HARNESS
#include <stdlib.h>
#endif

static const int32_t COEFF[2][3][3] = {
  {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}},
  {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}}
};

/* Line buffer of 3 image rows feeding a 3x3 window register.
 * One pixel enters per iteration; the window center trails the input by
 * 1 rows and 1 columns, so output starts after 641 pixels. */
void conv2d_stream(const pixel_t image[307200], int32_t out[307200]) {
#ifdef HLS_HARNESS
  pixel_t (*LineBuffer)[640] = calloc(3, sizeof(pixel_t[640]));
#else
  static pixel_t LineBuffer[3][640];
#endif
  int32_t WindowBuffer[3][3] = {{0}};

  for (uint32_t p = 0; p < 307200; p++) {
#pragma HLS PIPELINE II=1
    const uint32_t col = p % 640;
    pixel_t column[3];
    for (int r = 0; r < 2; r++) {
      column[r] = LineBuffer[r + 1][col];
    }
    column[2] = image[p];
    for (int r = 0; r < 3; r++) {
      LineBuffer[r][col] = column[r];
    }

    for (int r = 0; r < 3; r++) {
      for (int c = 0; c < 2; c++) {
        WindowBuffer[r][c] = WindowBuffer[r][c + 1];
      }
      WindowBuffer[r][2] = column[r];
    }

    if (p >= 641) {
      const uint32_t center = p - 641;
      const uint32_t crow = center / 640;
      const uint32_t ccol = center % 640;
      int32_t value = 0;
      if (crow >= 1 && crow < 479 && ccol >= 1 && ccol < 639) {
        for (int s = 0; s < 2; s++) {
          for (int r = 0; r < 3; r++) {
            for (int c = 0; c < 3; c++) {
              value += WindowBuffer[r][c] * COEFF[s][r][c];
            }
          }
        }
      }
      out[center] = value;
    }
  }

  /* trailing centers never enter the window; all are border positions */
  for (uint32_t c = 306559; c < 307200; c++) {
    out[c] = 0;
  }
#ifdef HLS_HARNESS
  free(LineBuffer);
#endif
}
