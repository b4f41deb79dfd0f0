#include <assert.h>

int sum_to(int n) {
    int sum = 0;
    for (int i = 0; i < n; i++) {
        sum += i;
    }
    return sum;
}

int main(void) {
    int s = sum_to(4);
    assert(s == 6);
    return 0;
}
