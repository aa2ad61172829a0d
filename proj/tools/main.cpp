#include "nlskt/cli.hpp"

int main(int argc, char** argv) { return nlskt::parse_and_dispatch(argc, argv); }
