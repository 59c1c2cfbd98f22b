/* Generated by hlsr codegen: conv2d_stream K=3 640x480 */
#ifndef CONV2D_STREAM_H
#define CONV2D_STREAM_H

#include <stdint.h>

#define CONV_K 3
#define CONV_WIDTH 640
#define CONV_HEIGHT 480
#define CONV_PIXELS 307200
#define CONV_SETS 2

typedef uint8_t pixel_t;

void conv2d_stream(const pixel_t image[307200], int32_t out[307200]);

#endif
