#include <assert.h>

int find(const int *a, int n, int key) {
    int i = 0;
    while (i < n) {
        if (a[i] == key) return i;
        i++;
    }
    return -1;
}

int main(void) {
    int a[3] = {4, 5, 6};
    int idx = find(a, 3, 5);
    assert(idx == 1);
    return 0;
}
