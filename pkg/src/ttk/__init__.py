"""Train track maps, gate structures, long turns and periodic INPs for graph self-maps."""
