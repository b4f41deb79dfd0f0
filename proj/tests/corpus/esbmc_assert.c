int twice(int x) {
    return 2 * x;
}

int main(void) {
    int t = twice(21);
    __ESBMC_assert(t == 42, "doubling");
    return 0;
}
