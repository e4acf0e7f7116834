#include <vector>
#include "shape.h"
#define MAX_ITEMS 64

// Sum of the first n values.
int sumValues(const std::vector<int>& values, int n) {
    int total = 0;
    for (int i = 0; i < n; i++) {
        total += values[i];
    }
    return total;
}

/* Count entries above a limit. */
static int count_above(int *data, int size, int limit)
{
    int count = 0, idx = 0;
    while (idx < size) {
        if (data[idx] > limit) count++;
        ++idx;
    }
    return count;
}

void report(int code) {
    switch (code) {
    case 0:
        break;
    default:
        if (code == 3) {
            return;
        } else {
            code = code > 10 ? MAX_ITEMS : code;
        }
    }
}

int main() {
    return (sumValues(std::vector<int>(5, 1), 5));
}
