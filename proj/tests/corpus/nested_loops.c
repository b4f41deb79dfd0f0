#include <assert.h>

int pairs(int n) {
    int c = 0;
    for (int i = 0; i < n; i++) {
        for (int j = i + 1; j < n; j++) {
            c++;
        }
    }
    return c;
}

int main(void) {
    int p = pairs(4);
    assert(p == 6);
    return 0;
}
