#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <hpsurf/numerics.hpp>

int main(int argc, char** argv) {
    hpsurf::set_default_precision(256);
    doctest::Context ctx;
    ctx.applyCommandLine(argc, argv);
    return ctx.run();
}
