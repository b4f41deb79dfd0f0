#include <assert.h>

/* Euclid, iterative. */
unsigned gcd(unsigned a, unsigned b) {
    while (b != 0) {
        unsigned t = a % b;
        a = b;
        b = t;
    }
    return a;
}

int main(void) {
    unsigned g = gcd(12u, 18u);
    assert(g == 6u);
    return 0;
}
