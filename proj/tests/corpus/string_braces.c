#include <assert.h>

const char *label = "{not a block}";

int brace_free(char c) {
    // '{' and '}' in literals must not confuse the scanner
    if (c == '{' || c == '}') return 0;
    return 1;
}

int main(void) {
    int ok = brace_free('a');
    assert(ok == 1);
    return 0;
}
