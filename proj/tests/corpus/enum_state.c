#include <assert.h>

enum mode { IDLE, RUN, STOP };

typedef enum mode mode_t;

mode_t next_mode(mode_t m) {
    switch (m) {
    case IDLE: return RUN;
    case RUN: return STOP;
    default: return STOP;
    }
}

int main(void) {
    mode_t m = next_mode(IDLE);
    assert(m == RUN);
    return 0;
}
