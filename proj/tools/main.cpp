#include "emdcast/cli.hpp"

int main(int argc, char** argv) {
    return emdcast::run_cli(argc, argv);
}
