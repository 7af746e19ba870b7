#include <cstdio>

int main() {
    std::puts("saferl cli placeholder");
    return 0;
}
