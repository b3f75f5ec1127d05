# schemas package init
