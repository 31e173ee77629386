// Command-line entry point. Subcommands are wired up as the toolchain layers
// land; this stub only proves the build.
#include <cstdio>

int main() {
    std::puts("strm: no subcommand given (try --help)");
    return 1;
}
